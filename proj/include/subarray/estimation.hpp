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
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "subarray/types.hpp"

namespace subarray {

using cd = std::complex<double>;

struct Source {
  Vec2 u;  // directional cosines
  cd alpha;
};

struct Snapshot {
  Eigen::VectorXcd x;
  std::vector<Source> truth;
  double sigma2 = 0.0;
  std::uint64_t seed = 0;
};

/// s(u) = exp(j k d . u).
Eigen::VectorXcd steering(std::span<const Vec2> d, Vec2 u);

/// x = sum alpha_j s(u_j) + z, z circular complex Gaussian with E zz^H = sigma2 I.
Snapshot synthesize(const std::vector<Source>& truth, double sigma2, std::span<const Vec2> d, std::uint64_t seed);

/// Array responses seen through an optional measurement matrix Phi (M x N).
class SensingModel {
 public:
  explicit SensingModel(std::vector<Vec2> d);
  SensingModel(std::vector<Vec2> d, Eigen::MatrixXcd phi);

  Eigen::Index dim() const { return compressed_ ? phi_.rows() : static_cast<Eigen::Index>(d_.size()); }
  const std::vector<Vec2>& positions() const { return d_; }
  bool compressed() const { return compressed_; }
  const Eigen::MatrixXcd& phi() const { return phi_; }

  Eigen::VectorXcd response(Vec2 u) const;
  /// Measurement of an element-domain snapshot.
  Eigen::VectorXcd measure(const Eigen::VectorXcd& x) const;

  struct Jet {
    Eigen::VectorXcd a, au, av, auu, auv, avv;
  };
  Jet jet(Vec2 u) const;

 private:
  Eigen::VectorXcd map(Eigen::VectorXcd v) const;
  std::vector<Vec2> d_;
  Eigen::MatrixXcd phi_;
  bool compressed_ = false;
};

/// Square lattice of DoAs inside the disc |u| <= radius, columns are model responses.
struct SteeringDictionary {
  std::vector<Vec2> grid;
  Eigen::MatrixXcd S;
  Eigen::VectorXd norm2;
};

SteeringDictionary make_dictionary(const SensingModel& model, double pitch, double radius);

/// Lattice pitch: a quarter of the narrowest half-power width in u.
double default_dictionary_pitch(std::span<const Vec2> d);

struct Estimate {
  Vec2 u;
  cd alpha;
};

/// ||y - alpha a(u)||^2.
double refine_objective(const SensingModel& m, const Estimate& e, const Eigen::VectorXcd& y);
/// Gradient of refine_objective in u at fixed alpha.
Vec2 refine_gradient(const SensingModel& m, const Estimate& e, const Eigen::VectorXcd& y);

/// One damped Newton step in u with a backtracking gradient fallback, then the gain in closed form.
/// Returns the input when no step lowers the objective.
Estimate newton_refine(const SensingModel& m, const Estimate& e, const Eigen::VectorXcd& y);

/// Grid maximizer of |a^H y|^2 / ||a||^2 with its least-squares gain.
Estimate detect(const SteeringDictionary& dict, const Eigen::VectorXcd& y);

/// Single-source estimate: detection then one Newton polish.
Estimate mle_single(const SensingModel& m, const SteeringDictionary& dict, const Eigen::VectorXcd& y);

struct NompOptions {
  std::size_t k = 1;
  int rounds = 3;
  std::optional<double> residual_stop;  // stop early once residual power falls below
};

struct EstimationResult {
  std::vector<Estimate> estimates;
  double residual_power = 0.0;
  std::vector<double> matched_error;  // per truth source, filled by match_errors
};

EstimationResult nomp(const SensingModel& m, const SteeringDictionary& dict, const Eigen::VectorXcd& y,
                      const NompOptions& opt);

/// Minimum-cost assignment; rows <= cols. Returns the column of each row.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

/// ||u_truth - u_hat|| per truth source after optimal matching.
std::vector<double> match_errors(const std::vector<Source>& truth, const std::vector<Estimate>& est);

struct ScenarioOptions {
  std::size_t k = 1;
  bool primary_at_broadside = true;
  double min_sep = 0.16;
  double interferer_db = 0.0;  // relative to the primary
  double theta_max = 30.0;
  int max_attempts = 10000;
};

/// Primary first. DoAs uniform on the disc of radius sin(theta_max), gains with uniform phase.
std::vector<Source> make_scenario(const ScenarioOptions& opt, std::uint64_t seed);

struct Metrics {
  double rmse = 0.0;
  std::vector<double> threshold_db;
  std::vector<double> ccdf;  // P(20 log10(e / sqrt 2) > threshold)
};

Metrics metrics(std::span<const double> errors, const std::vector<double>& threshold_db);
Metrics metrics(std::span<const double> errors);

struct CampaignOptions {
  ScenarioOptions scenario;
  std::vector<double> snr_db;
  std::size_t trials = 100;
  int rounds = 3;
  std::uint64_t seed = 1;
};

struct CampaignPoint {
  double snr_db = 0.0;
  double rmse = 0.0;
  std::vector<double> errors;  // primary error per trial
};

/// Seeded Monte-Carlo over trials and SNR points. The scenario of trial t and its noise
/// draws do not depend on the model, so arrays are compared on common random numbers.
std::vector<CampaignPoint> run_campaign(const SensingModel& m, const SteeringDictionary& dict,
                                        const CampaignOptions& opt);

void write_rmse_csv(const std::vector<CampaignPoint>& pts, std::ostream& os);
void write_ccdf_csv(const Metrics& m, std::ostream& os);

}  // namespace subarray
