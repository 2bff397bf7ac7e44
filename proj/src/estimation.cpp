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

#include "subarray/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "subarray/beampattern.hpp"
#include "subarray/rng.hpp"

namespace subarray {

Eigen::VectorXcd steering(std::span<const Vec2> d, Vec2 u) {
  Eigen::VectorXcd s(static_cast<Eigen::Index>(d.size()));
  for (std::size_t e = 0; e < d.size(); ++e) {
    const double ph = kWavenumber * d[e].dot(u);
    s(static_cast<Eigen::Index>(e)) = cd(std::cos(ph), std::sin(ph));
  }
  return s;
}

Snapshot synthesize(const std::vector<Source>& truth, double sigma2, std::span<const Vec2> d, std::uint64_t seed) {
  if (!(sigma2 >= 0.0)) throw InvalidArgument("sigma2 must be >= 0");
  if (d.empty()) throw InvalidArgument("empty array");
  Snapshot s;
  s.truth = truth;
  s.sigma2 = sigma2;
  s.seed = seed;
  s.x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d.size()));
  for (const Source& src : truth) s.x += src.alpha * steering(d, src.u);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(sigma2 / 2.0));
  for (Eigen::Index i = 0; i < s.x.size(); ++i) {
    const double re = g(rng);
    const double im = g(rng);
    s.x(i) += cd(re, im);
  }
  return s;
}

// ---------------------------------------------------------------------------

SensingModel::SensingModel(std::vector<Vec2> d) : d_(std::move(d)) {
  if (d_.empty()) throw InvalidArgument("empty array");
}

SensingModel::SensingModel(std::vector<Vec2> d, Eigen::MatrixXcd phi)
    : d_(std::move(d)), phi_(std::move(phi)), compressed_(true) {
  if (d_.empty()) throw InvalidArgument("empty array");
  if (phi_.cols() != static_cast<Eigen::Index>(d_.size()) || phi_.rows() < 1)
    throw InvalidArgument("measurement matrix does not match the array");
}

Eigen::VectorXcd SensingModel::map(Eigen::VectorXcd v) const {
  if (!compressed_) return v;
  return phi_ * v;
}

Eigen::VectorXcd SensingModel::response(Vec2 u) const { return map(steering(d_, u)); }

Eigen::VectorXcd SensingModel::measure(const Eigen::VectorXcd& x) const {
  if (x.size() != static_cast<Eigen::Index>(d_.size())) throw InvalidArgument("snapshot length mismatch");
  return map(x);
}

SensingModel::Jet SensingModel::jet(Vec2 u) const {
  const Eigen::Index n = static_cast<Eigen::Index>(d_.size());
  const Eigen::VectorXcd s = steering(d_, u);
  Eigen::VectorXcd su(n), sv(n), suu(n), suv(n), svv(n);
  const double k = kWavenumber;
  for (Eigen::Index e = 0; e < n; ++e) {
    const double x = d_[static_cast<std::size_t>(e)].x, y = d_[static_cast<std::size_t>(e)].y;
    su(e) = cd(0, k * x) * s(e);
    sv(e) = cd(0, k * y) * s(e);
    suu(e) = -k * k * x * x * s(e);
    suv(e) = -k * k * x * y * s(e);
    svv(e) = -k * k * y * y * s(e);
  }
  return {map(s), map(su), map(sv), map(suu), map(suv), map(svv)};
}

// ---------------------------------------------------------------------------

double default_dictionary_pitch(std::span<const Vec2> d) {
  const MainlobeEllipse e = mainlobe_ellipse(d);
  const double width_u = 2.0 * std::sin(e.bw_min * kPi / 360.0);
  return width_u / 4.0;
}

SteeringDictionary make_dictionary(const SensingModel& model, double pitch, double radius) {
  if (!(pitch > 0.0) || !(radius > 0.0) || radius > 1.0) throw InvalidArgument("bad dictionary lattice");
  SteeringDictionary dict;
  const int m = static_cast<int>(std::ceil(radius / pitch));
  for (int j = -m; j <= m; ++j)
    for (int i = -m; i <= m; ++i) {
      const Vec2 u{i * pitch, j * pitch};
      if (u.norm() <= radius + 1e-12) dict.grid.push_back(u);
    }
  const Eigen::Index g = static_cast<Eigen::Index>(dict.grid.size());
  dict.S.resize(model.dim(), g);
  dict.norm2.resize(g);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < g; ++c) {
    dict.S.col(c) = model.response(dict.grid[static_cast<std::size_t>(c)]);
    dict.norm2(c) = dict.S.col(c).squaredNorm();
  }
  return dict;
}

// ---------------------------------------------------------------------------

double refine_objective(const SensingModel& m, const Estimate& e, const Eigen::VectorXcd& y) {
  return (y - e.alpha * m.response(e.u)).squaredNorm();
}

namespace {

struct Local {
  double t = 0.0;
  Eigen::Vector2d g;
  Eigen::Matrix2d h;
};

Local local_model(const SensingModel& m, const Estimate& e, const Eigen::VectorXcd& y) {
  const SensingModel::Jet j = m.jet(e.u);
  const Eigen::VectorXcd r = y - e.alpha * j.a;
  const cd a = e.alpha;
  const double a2 = std::norm(a);
  Local l;
  l.t = r.squaredNorm();
  l.g(0) = -2.0 * std::real(a * r.dot(j.au));
  l.g(1) = -2.0 * std::real(a * r.dot(j.av));
  l.h(0, 0) = 2.0 * a2 * j.au.squaredNorm() - 2.0 * std::real(a * r.dot(j.auu));
  l.h(1, 1) = 2.0 * a2 * j.av.squaredNorm() - 2.0 * std::real(a * r.dot(j.avv));
  l.h(0, 1) = 2.0 * a2 * std::real(j.av.dot(j.au)) - 2.0 * std::real(a * r.dot(j.auv));
  l.h(1, 0) = l.h(0, 1);
  return l;
}

cd ls_gain(const Eigen::VectorXcd& a, const Eigen::VectorXcd& y) {
  const double n2 = a.squaredNorm();
  return n2 > 0.0 ? a.dot(y) / n2 : cd(0.0);
}

}  // namespace

Vec2 refine_gradient(const SensingModel& m, const Estimate& e, const Eigen::VectorXcd& y) {
  const Local l = local_model(m, e, y);
  return {l.g(0), l.g(1)};
}

Estimate newton_refine(const SensingModel& m, const Estimate& e, const Eigen::VectorXcd& y) {
  if (e.u.norm() > 1.0) throw InvalidArgument("estimate outside the unit disc");
  const Local l = local_model(m, e, y);
  if (!(l.g.squaredNorm() > 0.0)) return e;

  auto attempt = [&](const Eigen::Vector2d& dir, int halvings) -> std::optional<Vec2> {
    double t = 1.0;
    for (int i = 0; i <= halvings; ++i, t *= 0.5) {
      const Vec2 u{e.u.x + t * dir(0), e.u.y + t * dir(1)};
      if (u.norm() > 1.0) continue;
      if (refine_objective(m, {u, e.alpha}, y) < l.t) return u;
    }
    return std::nullopt;
  };

  std::optional<Vec2> moved;
  const double det = l.h.determinant();
  if (l.h(0, 0) > 0.0 && det > 0.0) moved = attempt(-l.h.inverse() * l.g, 8);
  if (!moved) {
    // gradient fallback scaled by the Gauss-Newton curvature
    const SensingModel::Jet j = m.jet(e.u);
    Eigen::Matrix2d gn;
    gn(0, 0) = j.au.squaredNorm();
    gn(1, 1) = j.av.squaredNorm();
    gn(0, 1) = gn(1, 0) = std::real(j.av.dot(j.au));
    gn *= 2.0 * std::norm(e.alpha);
    const double lmax = gn.trace();
    if (lmax > 0.0) moved = attempt(-l.g / lmax, 40);
  }
  if (!moved) return e;
  const Eigen::VectorXcd a = m.response(*moved);
  const Estimate f{*moved, ls_gain(a, y)};
  // the gain solve can lose the last ulp of a tiny step
  if ((y - f.alpha * a).squaredNorm() > (y - e.alpha * a).squaredNorm()) return {*moved, e.alpha};
  return f;
}

Estimate detect(const SteeringDictionary& dict, const Eigen::VectorXcd& y) {
  if (dict.grid.empty()) throw InvalidArgument("empty dictionary");
  const Eigen::VectorXcd c = dict.S.adjoint() * y;
  Eigen::Index best = 0;
  double bv = -1.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double v = std::norm(c(i)) / dict.norm2(i);
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  return {dict.grid[static_cast<std::size_t>(best)], c(best) / dict.norm2(best)};
}

Estimate mle_single(const SensingModel& m, const SteeringDictionary& dict, const Eigen::VectorXcd& y) {
  return newton_refine(m, detect(dict, y), y);
}

EstimationResult nomp(const SensingModel& m, const SteeringDictionary& dict, const Eigen::VectorXcd& y,
                      const NompOptions& opt) {
  if (opt.k < 1) throw InvalidArgument("need K >= 1");
  if (static_cast<Eigen::Index>(opt.k) > m.dim()) throw InvalidArgument("K exceeds the measurement dimension");
  if (y.size() != m.dim()) throw InvalidArgument("measurement length mismatch");
  if (opt.rounds < 0) throw InvalidArgument("rounds must be >= 0");
  EstimationResult res;
  std::vector<Eigen::VectorXcd> parts;
  Eigen::VectorXcd r = y;
  for (std::size_t k = 0; k < opt.k; ++k) {
    if (opt.residual_stop && r.squaredNorm() <= *opt.residual_stop) break;
    Estimate e = detect(dict, r);
    e = newton_refine(m, e, r);
    Eigen::VectorXcd p = e.alpha * m.response(e.u);
    r -= p;
    res.estimates.push_back(e);
    parts.push_back(std::move(p));
    for (int round = 0; round < opt.rounds; ++round)
      for (std::size_t l = 0; l < res.estimates.size(); ++l) {
        const Eigen::VectorXcd yl = r + parts[l];
        const Estimate f = newton_refine(m, res.estimates[l], yl);
        Eigen::VectorXcd q = f.alpha * m.response(f.u);
        const Eigen::VectorXcd rl = yl - q;
        if (rl.squaredNorm() <= r.squaredNorm()) {
          res.estimates[l] = f;
          parts[l] = std::move(q);
          r = rl;
        }
      }
  }
  res.residual_power = r.squaredNorm();
  return res;
}

// ---------------------------------------------------------------------------

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows()), m = static_cast<int>(cost.cols());
  if (n > m) throw InvalidArgument("assignment needs rows <= cols");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j)
        if (!used[j]) {
          const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= m; ++j)
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] > 0) col[p[j] - 1] = j - 1;
  return col;
}

std::vector<double> match_errors(const std::vector<Source>& truth, const std::vector<Estimate>& est) {
  if (truth.empty()) return {};
  if (est.empty()) throw InvalidArgument("no estimates to match");
  const bool flip = truth.size() > est.size();
  const Eigen::Index rows = static_cast<Eigen::Index>(flip ? est.size() : truth.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(flip ? truth.size() : est.size());
  Eigen::MatrixXd c(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Vec2 t = truth[static_cast<std::size_t>(flip ? j : i)].u;
      const Vec2 e = est[static_cast<std::size_t>(flip ? i : j)].u;
      c(i, j) = (t - e).norm();
    }
  const std::vector<int> a = hungarian(c);
  // unmatched truths (fewer estimates than sources) get the largest possible error
  std::vector<double> err(truth.size(), 2.0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::size_t ti = static_cast<std::size_t>(flip ? a[static_cast<std::size_t>(i)] : i);
    err[ti] = c(i, a[static_cast<std::size_t>(i)]);
  }
  return err;
}

// ---------------------------------------------------------------------------

std::vector<Source> make_scenario(const ScenarioOptions& opt, std::uint64_t seed) {
  if (opt.k < 1) throw InvalidArgument("need K >= 1");
  const double radius = std::sin(opt.theta_max * kPi / 180.0);
  if (!(radius > 0.0) || !(opt.min_sep >= 0.0)) throw InvalidArgument("bad scenario");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto point = [&] {
    const double r = radius * std::sqrt(unit(rng));
    const double p = 2.0 * kPi * unit(rng);
    return Vec2{r * std::cos(p), r * std::sin(p)};
  };
  auto gain = [&](double mag) { return std::polar(mag, 2.0 * kPi * unit(rng)); };
  std::vector<Source> out;
  out.push_back({opt.primary_at_broadside ? Vec2{} : point(), gain(1.0)});
  const double mag = std::pow(10.0, opt.interferer_db / 20.0);
  for (std::size_t k = 1; k < opt.k; ++k) {
    int tries = 0;
    Vec2 u = point();
    while ((u - out.front().u).norm() < opt.min_sep) {
      if (++tries >= opt.max_attempts) throw InfeasibleInstance("cannot place interferer with the requested separation");
      u = point();
    }
    out.push_back({u, gain(mag)});
  }
  return out;
}

Metrics metrics(std::span<const double> errors, const std::vector<double>& threshold_db) {
  if (errors.empty()) throw InvalidArgument("no errors");
  Metrics m;
  double s = 0.0;
  for (double e : errors) s += e * e;
  m.rmse = std::sqrt(s / errors.size() / 2.0);
  m.threshold_db = threshold_db;
  for (double t : threshold_db) {
    const double lim = std::sqrt(2.0) * std::pow(10.0, t / 20.0);
    std::size_t c = 0;
    for (double e : errors)
      if (e > lim) ++c;
    m.ccdf.push_back(static_cast<double>(c) / errors.size());
  }
  return m;
}

Metrics metrics(std::span<const double> errors) {
  std::vector<double> t;
  for (int i = 0; i <= 100; ++i) t.push_back(-50.0 + 0.5 * i);
  return metrics(errors, t);
}

std::vector<CampaignPoint> run_campaign(const SensingModel& m, const SteeringDictionary& dict,
                                        const CampaignOptions& opt) {
  if (opt.trials < 1) throw InvalidArgument("need at least one trial");
  std::vector<CampaignPoint> out;
  const std::int64_t trials = static_cast<std::int64_t>(opt.trials);
  for (std::size_t si = 0; si < opt.snr_db.size(); ++si) {
    CampaignPoint pt;
    pt.snr_db = opt.snr_db[si];
    pt.errors.assign(opt.trials, 0.0);
    const double sigma2 = std::pow(10.0, -pt.snr_db / 10.0);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t t = 0; t < trials; ++t) {
      const std::uint64_t ut = static_cast<std::uint64_t>(t);
      const std::vector<Source> truth = make_scenario(opt.scenario, derive_seed(opt.seed, {1, ut}));
      const Snapshot snap = synthesize(truth, sigma2, m.positions(), derive_seed(opt.seed, {2, ut, si}));
      const EstimationResult r = nomp(m, dict, m.measure(snap.x), {truth.size(), opt.rounds, std::nullopt});
      pt.errors[static_cast<std::size_t>(t)] = match_errors(truth, r.estimates).front();
    }
    pt.rmse = metrics(pt.errors, {}).rmse;
    out.push_back(std::move(pt));
  }
  return out;
}

void write_rmse_csv(const std::vector<CampaignPoint>& pts, std::ostream& os) {
  os << "snr_db,rmse,rmse_db\n";
  char buf[128];
  for (const CampaignPoint& p : pts) {
    std::snprintf(buf, sizeof buf, "%.3f,%.9e,%.4f\n", p.snr_db, p.rmse, 20.0 * std::log10(p.rmse));
    os << buf;
  }
}

void write_ccdf_csv(const Metrics& m, std::ostream& os) {
  os << "threshold_db,prob\n";
  char buf[96];
  for (std::size_t i = 0; i < m.threshold_db.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.3f,%.6f\n", m.threshold_db[i], m.ccdf[i]);
    os << buf;
  }
}

}  // namespace subarray
