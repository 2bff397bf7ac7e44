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

#include "subarray/bounds.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "subarray/beampattern.hpp"
#include "subarray/special.hpp"

namespace subarray {

namespace {

void require_centered(std::span<const Vec2> d) {
  if (d.empty()) throw InvalidArgument("empty array");
  Vec2 s;
  double scale = 0.0;
  for (Vec2 p : d) {
    s += p;
    scale = std::max(scale, p.norm());
  }
  if ((s * (1.0 / d.size())).norm() > 1e-9 * std::max(1.0, scale)) throw InvalidArgument("positions are not centered");
}

std::vector<double> h_grid(const ZzbOptions& opt) {
  if (opt.uniform_h < 2 || opt.log_h < 0 || !(opt.log_h_min > 0.0 && opt.log_h_min < 1.0))
    throw InvalidArgument("bad h grid");
  std::vector<double> h;
  for (int i = 0; i < opt.uniform_h; ++i) h.push_back(static_cast<double>(i) / (opt.uniform_h - 1));
  const double l0 = std::log10(opt.log_h_min);
  for (int i = 0; i < opt.log_h; ++i) h.push_back(std::pow(10.0, l0 - l0 * i / std::max(1, opt.log_h - 1)));
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end(), [](double a, double b) { return b - a < 1e-15; }), h.end());
  h.back() = 1.0;
  return h;
}

double chord_amplitude(std::span<const Vec2> d, Vec2 base, Vec2 dir, double t) {
  const Vec2 p = base + dir * t;
  return std::abs(array_factor(d, p.x, p.y)) / static_cast<double>(d.size());
}

}  // namespace

FisherInfo fisher_information(std::span<const Vec2> d, double snr, const Eigen::Matrix2d& prior) {
  require_centered(d);
  if (!(snr >= 0.0)) throw InvalidArgument("snr must be >= 0");
  Eigen::Matrix2d dtd = Eigen::Matrix2d::Zero();
  for (Vec2 p : d) {
    dtd(0, 0) += p.x * p.x;
    dtd(0, 1) += p.x * p.y;
    dtd(1, 1) += p.y * p.y;
  }
  dtd(1, 0) = dtd(0, 1);
  FisherInfo f;
  f.J_F = 2.0 * kWavenumber * kWavenumber * snr * dtd;
  f.J_P = prior;
  f.snr = snr;
  return f;
}

Eigen::Matrix2d crb_matrix(const FisherInfo& f) {
  const Eigen::Matrix2d j = f.total();
  const double det = j.determinant();
  if (!(std::abs(det) > 1e-300) || !(det > 1e-14 * j.squaredNorm())) throw DegenerateGeometry("singular Fisher information");
  return j.inverse();
}

double crb_rmse(std::span<const Vec2> d, double snr, const Eigen::Matrix2d& prior) {
  return std::sqrt(crb_matrix(fisher_information(d, snr, prior)).trace() / 2.0);
}

double noncoherent_pe(double gamma_n, double r) {
  if (!(gamma_n >= 0.0)) throw InvalidArgument("gamma N must be >= 0");
  if (!(r >= -1e-12 && r <= 1.0 + 1e-12)) throw InvalidArgument("correlation outside [0, 1]");
  r = std::clamp(r, 0.0, 1.0);
  if (gamma_n == 0.0) return 0.5;
  const double s = std::sqrt(1.0 - r * r);
  const double a = std::sqrt(gamma_n / 2.0 * (1.0 - s));
  const double b = std::sqrt(gamma_n / 2.0 * (1.0 + s));
  const double pe = marcum_q1(a, b) - 0.5 * std::exp(-(b - a) * (b - a) / 2.0) * bessel_i0e(a * b);
  return std::clamp(pe, 0.0, 0.5);
}

ChordProfile chord_profile(std::span<const Vec2> d, Vec2 axis, const ZzbOptions& opt) {
  if (d.empty()) throw InvalidArgument("empty array");
  if (opt.chord_points < 3) throw InvalidArgument("chord search needs >= 3 points");
  const double an = axis.norm();
  if (!(an > 0.0)) throw InvalidArgument("zero axis");
  const Vec2 a = axis * (1.0 / an);
  const Vec2 perp{-a.y, a.x};

  ChordProfile out;
  out.axis = a;
  out.h = h_grid(opt);
  out.r.assign(out.h.size(), 0.0);
  const std::size_t n = d.size();
  const int m = opt.chord_points;
  std::vector<double> along(n), across(n);
  for (std::size_t e = 0; e < n; ++e) {
    along[e] = kWavenumber * d[e].dot(a);
    across[e] = kWavenumber * d[e].dot(perp);
  }
  const std::int64_t nh = static_cast<std::int64_t>(out.h.size());

#pragma omp parallel
  {
    std::vector<double> re(n), im(n), sre(n), sim(n);
#pragma omp for schedule(dynamic, 8)
    for (std::int64_t ih = 0; ih < nh; ++ih) {
      const double h = out.h[static_cast<std::size_t>(ih)];
      const double w = std::sqrt(std::max(0.0, 1.0 - h * h));
      const Vec2 base = a * h;
      if (w == 0.0) {
        out.r[static_cast<std::size_t>(ih)] = std::min(1.0, chord_amplitude(d, base, perp, 0.0));
        continue;
      }
      const double dt = 2.0 * w / (m - 1);
      for (std::size_t e = 0; e < n; ++e) {
        const double ph = along[e] * h - across[e] * w;
        re[e] = std::cos(ph);
        im[e] = std::sin(ph);
        sre[e] = std::cos(across[e] * dt);
        sim[e] = std::sin(across[e] * dt);
      }
      double best = -1.0;
      int kbest = 0;
      for (int k = 0; k < m; ++k) {
        double sr = 0.0, si = 0.0;
        for (std::size_t e = 0; e < n; ++e) {
          sr += re[e];
          si += im[e];
          const double nr = re[e] * sre[e] - im[e] * sim[e];
          im[e] = re[e] * sim[e] + im[e] * sre[e];
          re[e] = nr;
        }
        const double v = sr * sr + si * si;
        if (v > best) {
          best = v;
          kbest = k;
        }
      }
      // golden section on the exact pattern around the best sample
      double lo = std::max(-w, -w + (kbest - 1) * dt), hi = std::min(w, -w + (kbest + 1) * dt);
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      double f1 = chord_amplitude(d, base, perp, x1), f2 = chord_amplitude(d, base, perp, x2);
      for (int it = 0; it < 40; ++it) {
        if (f1 > f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - g * (hi - lo);
          f1 = chord_amplitude(d, base, perp, x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + g * (hi - lo);
          f2 = chord_amplitude(d, base, perp, x2);
        }
      }
      const double sampled = std::sqrt(best) / static_cast<double>(n);
      out.r[static_cast<std::size_t>(ih)] = std::min(1.0, std::max({sampled, f1, f2}));
    }
  }
  return out;
}

double zzb_directional(const ChordProfile& profile, double gamma_n) {
  const std::size_t m = profile.h.size();
  if (m < 2 || profile.r.size() != m) throw InvalidArgument("bad chord profile");
  std::vector<double> v(m);
  double run = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    run = std::max(run, noncoherent_pe(gamma_n, profile.r[i]));
    v[i] = run;
  }
  double z = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i)
    z += 0.5 * (profile.h[i + 1] - profile.h[i]) * (v[i] * profile.h[i] + v[i + 1] * profile.h[i + 1]);
  if (!std::isfinite(z)) throw NumericalFailure("ZZB quadrature", z);
  return z;
}

double zzb_rmse(const ChordProfile& a1, const ChordProfile& a2, double gamma_n) {
  return std::sqrt((zzb_directional(a1, gamma_n) + zzb_directional(a2, gamma_n)) / 2.0);
}

double zzb_threshold(const std::vector<double>& snr_db, const std::vector<double>& crb,
                     const std::vector<double>& zzb, double factor) {
  if (snr_db.size() != crb.size() || snr_db.size() != zzb.size()) throw InvalidArgument("curve size mismatch");
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    const double q = std::log(zzb[i] / (factor * crb[i]));
    if (q <= 0.0) {
      if (i == 0 || !(prev > 0.0)) return snr_db[i];
      return snr_db[i - 1] + (snr_db[i] - snr_db[i - 1]) * prev / (prev - q);
    }
    prev = q;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

BoundCurve bound_curve(std::span<const Vec2> d, const std::vector<double>& snr_db, const ZzbOptions& opt,
                       double threshold_factor) {
  require_centered(d);
  const MainlobeEllipse e = mainlobe_ellipse(d);
  const ChordProfile p1 = chord_profile(d, e.axis_max, opt);
  const ChordProfile p2 = chord_profile(d, e.axis_min, opt);
  BoundCurve c;
  c.snr_db = snr_db;
  for (double s : snr_db) {
    const double g = std::pow(10.0, s / 10.0);
    c.crb.push_back(crb_rmse(d, g));
    c.zzb.push_back(zzb_rmse(p1, p2, g * static_cast<double>(d.size())));
  }
  c.threshold_snr = zzb_threshold(c.snr_db, c.crb, c.zzb, threshold_factor);
  return c;
}

void write_bound_csv(const BoundCurve& c, std::ostream& os) {
  os << "snr_db,crb,zzb\n";
  char buf[128];
  for (std::size_t i = 0; i < c.snr_db.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.3f,%.9e,%.9e\n", c.snr_db[i], c.crb[i], c.zzb[i]);
    os << buf;
  }
}

}  // namespace subarray
