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

#include "subarray/beampattern.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "subarray/quadrature.hpp"

namespace subarray {

namespace {

using CMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;

void check_grid(int n, double rho) {
  if (n < 64 || n % 2 != 0) throw InvalidArgument("pattern grid must be even and at least 64");
  if (!(rho >= 1.0 && rho <= 2.0)) throw InvalidArgument("expansion factor must lie in [1, 2]");
}

// phase(i, e) = exp(j k rho t_i p_e)
CMat phase_table(int n, double rho, std::span<const Vec2> d, bool use_x) {
  CMat m(n, static_cast<Eigen::Index>(d.size()));
  for (Eigen::Index e = 0; e < m.cols(); ++e) {
    const double p = use_x ? d[e].x : d[e].y;
    for (int i = 0; i < n; ++i) {
      const double t = (i - n / 2) * 2.0 / n;
      m(i, e) = std::polar(1.0, kWavenumber * rho * t * p);
    }
  }
  return m;
}

double clamp01(double r) { return std::min(1.0, std::max(0.0, r)); }

}  // namespace

double expansion_factor(double theta_max_deg) {
  if (!(theta_max_deg >= 0.0 && theta_max_deg <= 90.0)) throw InvalidArgument("theta_max must lie in [0, 90] deg");
  return 1.0 + std::sin(theta_max_deg * kPi / 180.0);
}

std::complex<double> array_factor(std::span<const Vec2> d, double u, double v) {
  std::complex<double> s = 0.0;
  for (const Vec2& p : d) s += std::polar(1.0, kWavenumber * (u * p.x + v * p.y));
  return s;
}

double pattern_value(std::span<const Vec2> d, double u, double v) {
  const double n = static_cast<double>(d.size());
  return clamp01(std::norm(array_factor(d, u, v)) / (n * n));
}

PatternField evaluate_pattern(std::span<const Vec2> d, int n, double rho) {
  check_grid(n, rho);
  if (d.empty()) throw InvalidArgument("empty element list");
  const CMat ex = phase_table(n, rho, d, true);
  const CMat ey = phase_table(n, rho, d, false);
  const double norm = 1.0 / (static_cast<double>(d.size()) * static_cast<double>(d.size()));

  PatternField f{n, rho, std::vector<double>(static_cast<std::size_t>(n) * n)};
  constexpr int kStrip = 16;
  const int strips = (n + kStrip - 1) / kStrip;
#pragma omp parallel for schedule(static)
  for (int s = 0; s < strips; ++s) {
    const int j0 = s * kStrip;
    const int m = std::min(kStrip, n - j0);
    // Column j of b is the row v~_j of the pattern.
    const CMat b = ex * ey.middleRows(j0, m).transpose();
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i)
        f.samples[static_cast<std::size_t>(j0 + j) * n + i] = clamp01(std::norm(b(i, j)) * norm);
  }
  return f;
}

PatternField evaluate_pattern_reference(std::span<const Vec2> d, int n, double rho) {
  check_grid(n, rho);
  if (d.empty()) throw InvalidArgument("empty element list");
  PatternField f{n, rho, std::vector<double>(static_cast<std::size_t>(n) * n)};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      f.samples[static_cast<std::size_t>(j) * n + i] = pattern_value(d, rho * f.coord(i), rho * f.coord(j));
  return f;
}

StructuredPattern::StructuredPattern(const ElementLayout& layout, int n, double rho)
    : n_(n), rho_(rho), elements_(layout.size()) {
  check_grid(n, rho);
  if (layout.offsets.empty()) throw InvalidArgument("empty layout");
  PatternField f = evaluate_pattern(layout.offsets, n, rho);
  module_power_ = std::move(f.samples);
}

PatternField StructuredPattern::evaluate(std::span<const Vec2> centers) const {
  if (centers.empty()) throw InvalidArgument("no subarray centers");
  const int n = n_;
  const std::size_t ns = centers.size();
  // split re/im tables so the inner loop vectorizes
  std::vector<double> xr(ns * n), xi(ns * n), yr(ns * n), yi(ns * n);
  for (std::size_t s = 0; s < ns; ++s)
    for (int i = 0; i < n; ++i) {
      const double t = (i - n / 2) * 2.0 / n;
      const std::complex<double> ex = std::polar(1.0, kWavenumber * rho_ * t * centers[s].x);
      const std::complex<double> ey = std::polar(1.0, kWavenumber * rho_ * t * centers[s].y);
      xr[s * n + i] = ex.real();
      xi[s * n + i] = ex.imag();
      yr[s * n + i] = ey.real();
      yi[s * n + i] = ey.imag();
    }
  const double norm = 1.0 / (static_cast<double>(ns) * static_cast<double>(ns));
  PatternField f{n, rho_, std::vector<double>(static_cast<std::size_t>(n) * n)};
  std::vector<double> ar(n), ai(n);
  // rows below the center follow from R(-u, -v) = R(u, v), except row 0
  for (int j = 0; j < n; j = (j == 0 ? n / 2 : j + 1)) {
    std::fill(ar.begin(), ar.end(), 0.0);
    std::fill(ai.begin(), ai.end(), 0.0);
    double* __restrict a_r = ar.data();
    double* __restrict a_i = ai.data();
    for (std::size_t s = 0; s < ns; ++s) {
      const double cr = yr[s * n + j], ci = yi[s * n + j];
      const double* __restrict pr = &xr[s * n];
      const double* __restrict pi = &xi[s * n];
      for (int i = 0; i < n; ++i) {
        a_r[i] += pr[i] * cr - pi[i] * ci;
        a_i[i] += pr[i] * ci + pi[i] * cr;
      }
    }
    double* out = &f.samples[static_cast<std::size_t>(j) * n];
    const double* pw = &module_power_[static_cast<std::size_t>(j) * n];
    for (int i = 0; i < n; ++i) out[i] = clamp01((a_r[i] * a_r[i] + a_i[i] * a_i[i]) * norm * pw[i]);
    if (j > n / 2) {
      double* mirror = &f.samples[static_cast<std::size_t>(n - j) * n];
      mirror[0] = clamp01(std::norm(array_factor(centers, -rho_, rho_ * f.coord(n - j))) * norm *
                          module_power_[static_cast<std::size_t>(n - j) * n]);
      for (int i = 1; i < n; ++i) mirror[i] = out[n - i];
    }
  }
  return f;
}

std::optional<double> extract_msll(const PatternField& field, int eps) {
  const int n = field.n;
  if (eps < 1) throw InvalidArgument("neighborhood must span at least one cell");
  // unit disc as a column range per row
  std::vector<int> lo(n, n), hi(n, -1);
  for (int j = 0; j < n; ++j) {
    const double v = field.coord(j);
    if (v * v > 1.0) continue;
    const double half = std::sqrt(1.0 - v * v) * (n / 2);
    lo[j] = std::max(0, static_cast<int>(std::ceil(n / 2 - half - 1e-9)));
    hi[j] = std::min(n - 1, static_cast<int>(std::floor(n / 2 + half + 1e-9)));
  }
  auto in_disc = [&](int i, int j) { return i >= lo[j] && i <= hi[j]; };

  // mainlobe: 4-connected region >= half of the peak around the origin
  double rmax = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = lo[j]; i <= hi[j]; ++i) rmax = std::max(rmax, field.at(i, j));
  if (rmax <= 0.0) return std::nullopt;
  std::vector<std::uint8_t> main(field.samples.size(), 0);
  std::vector<int> stack{field.center() * n + field.center()};
  main[stack.back()] = 1;
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    const int i = k % n, j = k / n;
    const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[0] >= n || q[1] < 0 || q[1] >= n) continue;
      const int kk = q[1] * n + q[0];
      if (main[kk] || !in_disc(q[0], q[1]) || field.samples[kk] < 0.5 * rmax) continue;
      main[kk] = 1;
      stack.push_back(kk);
    }
  }

  double best = -1.0;
  for (int j = 0; j < n; ++j)
    for (int i = lo[j]; i <= hi[j]; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * n + i;
      if (main[k]) continue;
      const double r = field.samples[k];
      if (r <= best) continue;
      // cheap reject on the four nearest samples first
      if ((i + 1 <= hi[j] && field.samples[k + 1] > r) || (i - 1 >= lo[j] && field.samples[k - 1] > r) ||
          (j + 1 < n && in_disc(i, j + 1) && field.samples[k + n] > r) ||
          (j > 0 && in_disc(i, j - 1) && field.samples[k - n] > r))
        continue;
      bool peak = true;
      for (int dj = -eps; dj <= eps && peak; ++dj)
        for (int di = -eps; di <= eps; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || ii >= n || jj < 0 || jj >= n) continue;
          const std::size_t kk = static_cast<std::size_t>(jj) * n + ii;
          if (in_disc(ii, jj) && field.samples[kk] > r) {
            peak = false;
            break;
          }
        }
      if (peak) best = r;
    }
  if (best <= 0.0) return std::nullopt;
  return 10.0 * std::log10(best / rmax);
}

MainlobeEllipse ellipse_from_moments(double sxx, double sxy, double syy, std::size_t n) {
  const SymEig2 e = sym_eig2(sxx, sxy, syy);
  if (!(e.lambda1 > 1e-12 * std::max(1.0, e.lambda2)))
    throw DegenerateGeometry("element positions are collinear");
  const double k2 = kWavenumber * kWavenumber;
  auto width = [&](double lambda) {
    const double s = std::sqrt(static_cast<double>(n) / (2.0 * k2 * lambda));
    return 360.0 / kPi * std::asin(std::min(1.0, s));
  };
  MainlobeEllipse m;
  m.lambda1 = e.lambda1;
  m.lambda2 = e.lambda2;
  m.n = n;
  m.bw_max = width(e.lambda1);
  m.bw_min = width(e.lambda2);
  m.axis_max = e.p1;
  m.axis_min = e.p2;
  const double q = m.bw_min / m.bw_max;
  m.ecc = std::sqrt(std::max(0.0, 1.0 - q * q));
  return m;
}

MainlobeEllipse mainlobe_ellipse(std::span<const Vec2> d) {
  if (d.empty()) throw InvalidArgument("empty element list");
  const Cov2 c = covariance(d);
  const double n = static_cast<double>(d.size());
  return ellipse_from_moments(c.sxx * n, c.sxy * n, c.syy * n, d.size());
}

MainlobeEllipse mainlobe_ellipse(std::span<const Vec2> centers, const ElementLayout& layout) {
  if (centers.empty()) throw InvalidArgument("no subarray centers");
  // D^T D = Ne * sum_s (c_s - c)(c_s - c)^T + Ns * sum_e o_e o_e^T
  const Cov2 cc = covariance(centers);
  const Cov2 co = covariance(layout.offsets);
  const double ns = static_cast<double>(centers.size());
  const double ne = static_cast<double>(layout.size());
  const double w = ns * ne;
  return ellipse_from_moments(w * (cc.sxx + co.sxx), w * (cc.sxy + co.sxy), w * (cc.syy + co.syy),
                              centers.size() * layout.size());
}

double hpbc_numeric(std::span<const Vec2> d, Vec2 axis) {
  const double len = axis.norm();
  if (!(len > 0.0)) throw InvalidArgument("zero direction");
  const Vec2 a = axis * (1.0 / len);
  auto r = [&](double t) { return pattern_value(d, t * a.x, t * a.y); };
  double lo = 0.0, hi = -1.0;
  for (double t = 1e-3; t <= 1.0; t += 1e-3) {
    if (r(t) < 0.5) {
      hi = t;
      break;
    }
    lo = t;
  }
  if (hi < 0.0) return 180.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (r(mid) >= 0.5 ? lo : hi) = mid;
  }
  return 360.0 / kPi * std::asin(0.5 * (lo + hi));
}

double hemisphere_average(std::span<const Vec2> d, int order) {
  const GaussLegendre gl(order, 0.0, 0.5 * kPi);
  const int nphi = order;
  const double n2 = static_cast<double>(d.size()) * static_cast<double>(d.size());
  double total = 0.0;
  // R(-u) = R(u), so phi over half a turn suffices.
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (int k = 0; k < nphi; ++k) {
    const double phi = kPi * k / nphi;
    const double c = std::cos(phi), s = std::sin(phi);
    double acc = 0.0;
    for (int l = 0; l < order; ++l) {
      const double r = std::sin(gl.nodes[l]);
      acc += gl.weights[l] * r * std::norm(array_factor(d, r * c, r * s)) / n2;
    }
    total += acc;
  }
  return total / nphi;
}

double directivity(std::span<const Vec2> d, double tol) {
  if (d.empty()) throw InvalidArgument("empty element list");
  double span = 0.0;
  for (const Vec2& a : d)
    for (const Vec2& b : d) span = std::max(span, (a - b).norm());
  int order = 16;
  while (order < kWavenumber * span) order *= 2;
  double prev = hemisphere_average(d, order);
  for (int it = 0; it < 6; ++it) {
    order *= 2;
    const double cur = hemisphere_average(d, order);
    const double residual = std::abs(cur - prev) / cur;
    if (residual < tol) return 10.0 * std::log10(1.0 / cur);
    prev = cur;
    if (it == 5) throw NumericalFailure("directivity quadrature did not converge", residual);
  }
  return 10.0 * std::log10(1.0 / prev);
}

BeamAttributes beam_attributes(std::span<const Vec2> d, const AttributeOptions& opt) {
  const double rho = expansion_factor(opt.theta_max);
  const PatternField ebp = evaluate_pattern(d, opt.n, rho);
  const MainlobeEllipse e = mainlobe_ellipse(d);
  BeamAttributes a;
  a.bw_max = e.bw_max;
  a.bw_min = e.bw_min;
  a.bw_doa = std::hypot(e.bw_max, e.bw_min);
  a.ecc = e.ecc;
  a.msll = extract_msll(ebp, opt.eps).value_or(-std::numeric_limits<double>::infinity());
  if (opt.with_directivity) a.directivity = directivity(d);
  return a;
}

BeamAttributes beam_attributes(const SuperArrayConfig& config, const ElementLayout& layout,
                               const AttributeOptions& opt) {
  const std::vector<Vec2> d = expand_super_array(config, layout);
  return beam_attributes(d, opt);
}

void write_pattern_csv(const PatternField& field, std::ostream& os) {
  os << "u,v,R\n";
  char buf[96];
  for (int j = 0; j < field.n; ++j)
    for (int i = 0; i < field.n; ++i) {
      std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.9g\n", field.coord(i), field.coord(j), field.at(i, j));
      os << buf;
    }
}

namespace {
constexpr char kMagic[4] = {'S', 'A', 'P', 'F'};
}

void write_pattern_binary(const PatternField& field, std::ostream& os) {
  const std::uint32_t n = static_cast<std::uint32_t>(field.n);
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&n), 4);
  os.write(reinterpret_cast<const char*>(&field.rho), 8);
  std::vector<float> buf(field.samples.begin(), field.samples.end());
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

PatternField read_pattern_binary(std::istream& is) {
  char magic[4];
  std::uint32_t n = 0;
  double rho = 0.0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&rho), 8);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw ParseError("not a pattern dump", 0);
  std::vector<float> buf(static_cast<std::size_t>(n) * n);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!is) throw ParseError("truncated pattern dump", 0);
  return {static_cast<int>(n), rho, std::vector<double>(buf.begin(), buf.end())};
}

void write_attributes_csv_header(std::ostream& os) { os << "bw_max,bw_min,bw_doa,msll,directivity,ecc\n"; }

void write_attributes_csv_row(const BeamAttributes& a, std::ostream& os) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", a.bw_max, a.bw_min, a.bw_doa, a.msll,
                a.directivity, a.ecc);
  os << buf;
}

}  // namespace subarray
