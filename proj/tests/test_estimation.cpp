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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <omp.h>
#include <random>
#include <sstream>

#include "doctest.h"
#include "subarray/benchmarks.hpp"
#include "subarray/estimation.hpp"
#include "subarray/rng.hpp"

using namespace subarray;

namespace {

std::vector<Vec2> naive_array() {
  const ElementLayout l = build_subarray_layout(4, 4, 0.5, 0.6);
  return expand_super_array(naive_benchmark(l), l);
}

}  // namespace

TEST_CASE("synthesis") {
  const std::vector<Vec2> d = naive_array();
  const Snapshot s = synthesize({{{0, 0}, cd(0.3, -1.1)}}, 0.0, d, 9);
  for (Eigen::Index i = 0; i < s.x.size(); ++i) CHECK(s.x(i) == cd(0.3, -1.1));

  const std::vector<Vec2> four{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  Eigen::Matrix4cd cov = Eigen::Matrix4cd::Zero();
  const int draws = 10000;
  const double sigma2 = 0.7;
  for (int t = 0; t < draws; ++t) {
    const Snapshot z = synthesize({}, sigma2, four, derive_seed(3, {static_cast<std::uint64_t>(t)}));
    cov += z.x * z.x.adjoint();
  }
  cov /= draws;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) CHECK(std::abs(cov(i, j).real() - sigma2) <= 0.05 * sigma2);
      else CHECK(std::abs(cov(i, j)) <= 0.05 * sigma2);
    }
  CHECK_THROWS_AS(synthesize({}, -1.0, four, 1), InvalidArgument);
}

TEST_CASE("dictionary") {
  const std::vector<Vec2> d = naive_array();
  const SensingModel m(d);
  const SteeringDictionary dict = make_dictionary(m, 0.05, 0.5);
  for (const Vec2& u : dict.grid) CHECK(u.norm() <= 0.5 + 1e-12);
  for (Eigen::Index c = 0; c < dict.S.cols(); ++c) CHECK(dict.norm2(c) == doctest::Approx(d.size()).epsilon(1e-12));
  CHECK(std::count(dict.grid.begin(), dict.grid.end(), Vec2{0, 0}) == 1);
  CHECK_THROWS_AS(make_dictionary(m, 0.0, 0.5), InvalidArgument);
}

TEST_CASE("Newton refinement") {
  const std::vector<Vec2> d = naive_array();
  const SensingModel m(d);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);

  SUBCASE("gradient matches central differences") {
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXcd y = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d.size()));
      for (int k = 0; k < 2; ++k) y += cd(u(rng), u(rng)) * steering(d, {u(rng), u(rng)});
      const Estimate e{{u(rng) * 0.9, u(rng) * 0.9}, cd(u(rng) + 1.0, u(rng))};
      const Vec2 g = refine_gradient(m, e, y);
      const double h = 1e-6;
      const double gx = (refine_objective(m, {e.u + Vec2{h, 0}, e.alpha}, y) -
                         refine_objective(m, {e.u - Vec2{h, 0}, e.alpha}, y)) / (2 * h);
      const double gy = (refine_objective(m, {e.u + Vec2{0, h}, e.alpha}, y) -
                         refine_objective(m, {e.u - Vec2{0, h}, e.alpha}, y)) / (2 * h);
      const double err = std::hypot(gx - g.x, gy - g.y) / g.norm();
      CHECK(err <= 1e-6);
      ++checked;
    }
    CHECK(checked == 100);
  }

  SUBCASE("fixed point at the noiseless optimum") {
    const Source s{{0.123, -0.201}, cd(0.8, 0.6)};
    const Eigen::VectorXcd y = s.alpha * steering(d, s.u);
    const Estimate e = newton_refine(m, {s.u, s.alpha}, y);
    CHECK((e.u - s.u).norm() < 1e-12);
    CHECK(std::abs(e.alpha - s.alpha) < 1e-12);
  }

  SUBCASE("objective never rises") {
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXcd y = steering(d, {u(rng), u(rng)});
      const SteeringDictionary dict = make_dictionary(m, 0.1, 0.5);
      Estimate e = detect(dict, y);
      double last = refine_objective(m, e, y);
      for (int s = 0; s < 5; ++s) {
        e = newton_refine(m, e, y);
        const double now = refine_objective(m, e, y);
        CHECK(now <= last);
        last = now;
      }
    }
  }
}

TEST_CASE("NOMP") {
  const std::vector<Vec2> d = naive_array();
  const SensingModel m(d);
  const double pitch = default_dictionary_pitch(d);
  const SteeringDictionary dict = make_dictionary(m, pitch, 0.5 + pitch);

  SUBCASE("single on-grid source") {
    const Source s{dict.grid[dict.grid.size() / 3], cd(-0.4, 0.9)};
    const Eigen::VectorXcd y = s.alpha * steering(d, s.u);
    const EstimationResult r = nomp(m, dict, y, {1, 3, std::nullopt});
    REQUIRE(r.estimates.size() == 1);
    CHECK((r.estimates[0].u - s.u).norm() < 1e-12);
    CHECK(std::abs(r.estimates[0].alpha - s.alpha) < 1e-12);
    CHECK((mle_single(m, dict, y).u - s.u).norm() < 1e-12);
  }

  SUBCASE("off-grid source at a cell midpoint") {
    const Vec2 u0 = dict.grid[dict.grid.size() / 2] + Vec2{pitch / 2, pitch / 2};
    const Eigen::VectorXcd y = steering(d, u0);
    const EstimationResult r = nomp(m, dict, y, {1, 3, std::nullopt});
    CHECK((r.estimates[0].u - u0).norm() < 1e-3 * pitch);
  }

  SUBCASE("two separated sources") {
    const std::vector<Source> truth{{{0.013, -0.021}, cd(1, 0)}, {{-0.27, 0.19}, cd(0, 0.8)}};
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d.size()));
    for (const auto& s : truth) y += s.alpha * steering(d, s.u);
    const EstimationResult r = nomp(m, dict, y, {2, 6, std::nullopt});
    const std::vector<double> err = match_errors(truth, r.estimates);
    CHECK(err[0] <= 1e-6);
    CHECK(err[1] <= 1e-6);
    CHECK(r.residual_power < 1e-12 * y.squaredNorm());
  }

  SUBCASE("residual does not rise with more detections") {
    const std::vector<Source> truth = make_scenario({5, true, 0.16, -6.0, 30.0, 10000}, 77);
    const Snapshot s = synthesize(truth, 0.5, d, 78);
    double last = s.x.squaredNorm();
    for (std::size_t k = 1; k <= 6; ++k) {
      const EstimationResult r = nomp(m, dict, s.x, {k, 3, std::nullopt});
      CHECK(r.estimates.size() == k);
      CHECK(r.residual_power <= last * (1 + 1e-12));
      last = r.residual_power;
    }
    const EstimationResult early = nomp(m, dict, s.x, {5, 3, s.x.squaredNorm() * 2});
    CHECK(early.estimates.empty());
  }

  SUBCASE("errors") {
    const Eigen::VectorXcd y = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(d.size()));
    CHECK_THROWS_AS(nomp(m, dict, y, {d.size() + 1, 3, std::nullopt}), InvalidArgument);
    CHECK_THROWS_AS(nomp(m, dict, y, {0, 3, std::nullopt}), InvalidArgument);
  }

  SUBCASE("pure noise scatters over the dictionary disc") {
    std::vector<double> err;
    const double rd = 0.5 + pitch;
    for (std::uint64_t t = 0; t < 2000; ++t) {
      const Snapshot z = synthesize({}, 1.0, d, derive_seed(21, {t}));
      const std::vector<Source> truth = make_scenario({1, false, 0.0, 0.0, 30.0, 10}, derive_seed(22, {t}));
      err.push_back(match_errors(truth, {mle_single(m, dict, z.x)}).front());
    }
    // independent uniform discs of radii 0.5 and rd
    const double ref = std::sqrt((0.25 / 2 + rd * rd / 2) / 2);
    CHECK(metrics(err).rmse == doctest::Approx(ref).epsilon(0.05));
  }
}

TEST_CASE("assignment") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 30; ++t) {
    const int rows = 1 + t % 5, cols = rows + t % 3;
    Eigen::MatrixXd c(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) c(i, j) = u(rng);
    const std::vector<int> a = hungarian(c);
    double got = 0;
    for (int i = 0; i < rows; ++i) got += c(i, a[i]);
    std::vector<int> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e9;
    do {
      double s = 0;
      for (int i = 0; i < rows; ++i) s += c(i, perm[i]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
  const std::vector<Source> truth{{{0, 0}, 1.0}, {{0.3, 0}, 1.0}, {{0, 0.3}, 1.0}};
  std::vector<Estimate> est{{{0.29, 0.01}, 1.0}, {{0.01, 0.31}, 1.0}, {{0.02, 0}, 1.0}};
  const std::vector<double> e1 = match_errors(truth, est);
  std::reverse(est.begin(), est.end());
  CHECK(match_errors(truth, est) == e1);
  CHECK(e1[0] == doctest::Approx(0.02));
  CHECK_THROWS_AS(hungarian(Eigen::MatrixXd::Zero(3, 2)), InvalidArgument);
}

TEST_CASE("scenarios") {
  const std::vector<Source> one = make_scenario({1, true, 0.16, 0.0, 30.0, 10}, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].u == Vec2{0, 0});
  CHECK(std::abs(one[0].alpha) == doctest::Approx(1.0));

  double dmin = 1e9;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const std::vector<Source> sc = make_scenario({5, true, 0.16, -6.0, 30.0, 10000}, s);
    REQUIRE(sc.size() == 5);
    for (std::size_t k = 1; k < sc.size(); ++k) {
      dmin = std::min(dmin, sc[k].u.norm());
      CHECK(sc[k].u.norm() <= 0.5 + 1e-12);
      CHECK(std::abs(sc[k].alpha) == doctest::Approx(std::pow(10.0, -6.0 / 20)));
    }
  }
  CHECK(dmin >= 0.16);
  CHECK_THROWS_AS(make_scenario({3, true, 2.0, 0.0, 30.0, 100}, 1), InfeasibleInstance);
}

TEST_CASE("metrics") {
  const std::vector<double> zero(10, 0.0);
  const Metrics z = metrics(zero);
  CHECK(z.rmse == 0.0);
  for (double p : z.ccdf) CHECK(p == 0.0);

  const std::vector<double> e{0.1, 0.2, 0.2, 0.4};
  const Metrics m = metrics(e, {20 * std::log10(0.15 / std::sqrt(2.0)), 20 * std::log10(0.3 / std::sqrt(2.0))});
  CHECK(m.rmse == doctest::Approx(std::sqrt((0.01 + 0.04 + 0.04 + 0.16) / 4 / 2)));
  CHECK(m.ccdf[0] == 0.75);
  CHECK(m.ccdf[1] == 0.25);
  CHECK_THROWS_AS(metrics(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("campaign is reproducible across thread counts") {
  const std::vector<Vec2> d = naive_array();
  const SensingModel m(d);
  const SteeringDictionary dict = make_dictionary(m, 0.03, 0.53);
  CampaignOptions o;
  o.scenario = {3, true, 0.16, 0.0, 30.0, 10000};
  o.snr_db = {-5, 5};
  o.trials = 24;
  o.seed = 99;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = run_campaign(m, dict, o);
  omp_set_num_threads(4);
  const auto b = run_campaign(m, dict, o);
  omp_set_num_threads(saved);
  std::ostringstream sa, sb;
  write_rmse_csv(a, sa);
  write_rmse_csv(b, sb);
  CHECK(sa.str() == sb.str());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].errors == b[i].errors);
  CHECK(sa.str().rfind("snr_db,rmse,rmse_db\n-5.000,", 0) == 0);
}
