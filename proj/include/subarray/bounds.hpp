// SPDX-License-Identifier: Apache-2.0
//
// subarray-design: placement optimization and DoA evaluation for sparse arrays of subarrays
// Copyright (C) 2026 The subarray-design authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <span>
#include <vector>

#include "subarray/types.hpp"

namespace subarray {

/// Prior information of a DoA uniform over the 30 degree cone.
inline constexpr double kPriorFim = 1.343;

struct FisherInfo {
  Eigen::Matrix2d J_F = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d J_P = Eigen::Matrix2d::Zero();
  double snr = 0.0;
  Eigen::Matrix2d total() const { return J_F + J_P; }
};

/// J_F = 2 k^2 snr D^T D for centered positions `d`; snr is |alpha|^2 / sigma^2.
FisherInfo fisher_information(std::span<const Vec2> d, double snr,
                              const Eigen::Matrix2d& prior = kPriorFim * Eigen::Matrix2d::Identity());

/// (J_F + J_P)^-1.
Eigen::Matrix2d crb_matrix(const FisherInfo& f);

/// sqrt(tr(CRB) / 2).
double crb_rmse(std::span<const Vec2> d, double snr,
                const Eigen::Matrix2d& prior = kPriorFim * Eigen::Matrix2d::Identity());

/// Error probability of the optimal noncoherent detector between two directions
/// whose normalized correlation magnitude is r. Clamped to [0, 1/2].
double noncoherent_pe(double gamma_n, double r);

struct ZzbOptions {
  int uniform_h = 512;
  int log_h = 512;
  double log_h_min = 1e-6;
  int chord_points = 1024;
};

/// max |R(delta)| over the chord {a^T delta = h, |delta| <= 1} of the unit disc, for each h.
struct ChordProfile {
  Vec2 axis;
  std::vector<double> h;
  std::vector<double> r;  // amplitude, in [0, 1]
};

ChordProfile chord_profile(std::span<const Vec2> d, Vec2 axis, const ZzbOptions& opt = {});

/// Integral over [0, 1] of the valley-filled Pe(h) times h.
double zzb_directional(const ChordProfile& profile, double gamma_n);

/// sqrt((Z_1 + Z_2) / 2) over the two principal beamwidth axes.
double zzb_rmse(const ChordProfile& a1, const ChordProfile& a2, double gamma_n);

struct BoundCurve {
  std::vector<double> snr_db;
  std::vector<double> crb;
  std::vector<double> zzb;
  double threshold_snr = 0.0;  // NaN when the ZZB never comes within the factor
};

/// CRB and ZZB over an SNR sweep (dB, per element). Axes from the mainlobe ellipse.
BoundCurve bound_curve(std::span<const Vec2> d, const std::vector<double>& snr_db, const ZzbOptions& opt = {},
                       double threshold_factor = 1.1);

/// Smallest SNR where zzb <= factor * crb, log-interpolated between sweep points.
double zzb_threshold(const std::vector<double>& snr_db, const std::vector<double>& crb,
                     const std::vector<double>& zzb, double factor = 1.1);

void write_bound_csv(const BoundCurve& c, std::ostream& os);

}  // namespace subarray
