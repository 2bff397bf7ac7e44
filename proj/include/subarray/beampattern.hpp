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

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "subarray/geometry.hpp"

namespace subarray {

/// Sampled power pattern on an n x n grid of (u~, v~) in [-1, 1).
/// Sample (i, j) sits at u~ = (i - n/2) * 2/n, v~ = (j - n/2) * 2/n, row-major in j.
struct PatternField {
  int n = 0;
  double rho = 1.0;
  std::vector<double> samples;

  double coord(int i) const { return (i - n / 2) * 2.0 / n; }
  double at(int i, int j) const { return samples[static_cast<std::size_t>(j) * n + i]; }
  int center() const { return n / 2; }
};

/// Expansion factor 1 + sin(theta_max), theta_max in degrees.
double expansion_factor(double theta_max_deg);

/// Exact |sum_i exp(jk(u dx_i + v dy_i))|^2 / N^2.
double pattern_value(std::span<const Vec2> d, double u, double v);
std::complex<double> array_factor(std::span<const Vec2> d, double u, double v);

/// OpenMP kernel: blocked complex products over row strips.
PatternField evaluate_pattern(std::span<const Vec2> d, int n, double rho);
/// Serial direct sum, kept for testing.
PatternField evaluate_pattern_reference(std::span<const Vec2> d, int n, double rho);

/// Pattern of identical modules: the subarray power is tabulated once and the
/// center factor is an n x N_s x n product. Serial, meant to be called from
/// parallel loops over configurations.
class StructuredPattern {
 public:
  StructuredPattern(const ElementLayout& layout, int n, double rho);
  PatternField evaluate(std::span<const Vec2> centers) const;
  int n() const { return n_; }
  double rho() const { return rho_; }

 private:
  int n_;
  double rho_;
  std::size_t elements_;
  std::vector<double> module_power_;
};

/// Largest sidelobe in dB, or nullopt when the disc holds no sidelobe peak.
/// A sample is a peak if no sample within `eps` cells (inside the unit disc) exceeds it.
/// The connected half-power region around (0, 0) is the mainlobe.
std::optional<double> extract_msll(const PatternField& field, int eps = 2);

struct MainlobeEllipse {
  double bw_max = 0.0;  // degrees
  double bw_min = 0.0;
  double ecc = 0.0;
  Vec2 axis_max;  // direction of the widest cut
  Vec2 axis_min;
  double lambda1 = 0.0;  // eigenvalues of D^T D, ascending
  double lambda2 = 0.0;
  std::size_t n = 0;
};

/// Half-power contour from the quadratic expansion of R about its peak.
MainlobeEllipse mainlobe_ellipse(std::span<const Vec2> d);
/// Same, from centers and module offsets without expanding the array.
MainlobeEllipse mainlobe_ellipse(std::span<const Vec2> centers, const ElementLayout& layout);
MainlobeEllipse ellipse_from_moments(double sxx, double sxy, double syy, std::size_t n);

/// Full half-power width (degrees) of the exact pattern along a unit direction.
double hpbc_numeric(std::span<const Vec2> d, Vec2 axis);

/// 10 log10(R_max / R_avg) with R_avg the hemisphere average of the exact pattern.
/// Polar quadrature with r = sin(psi); doubles the order until two passes agree.
double directivity(std::span<const Vec2> d, double tol = 1e-4);
/// Fixed-order quadrature used by directivity().
double hemisphere_average(std::span<const Vec2> d, int order);

struct BeamAttributes {
  double bw_max = 0.0;
  double bw_min = 0.0;
  double bw_doa = 0.0;
  double msll = 0.0;  // -inf when no sidelobe
  double directivity = 0.0;
  double ecc = 0.0;
};

struct AttributeOptions {
  int n = 512;
  int eps = 2;
  double theta_max = 30.0;
  bool with_directivity = true;
};

BeamAttributes beam_attributes(const SuperArrayConfig& config, const ElementLayout& layout,
                               const AttributeOptions& opt = {});
BeamAttributes beam_attributes(std::span<const Vec2> d, const AttributeOptions& opt = {});

void write_pattern_csv(const PatternField& field, std::ostream& os);
void write_pattern_binary(const PatternField& field, std::ostream& os);
PatternField read_pattern_binary(std::istream& is);
void write_attributes_csv_header(std::ostream& os);
void write_attributes_csv_row(const BeamAttributes& a, std::ostream& os);

}  // namespace subarray
