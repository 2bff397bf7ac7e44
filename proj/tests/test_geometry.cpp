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
#include <random>

#include "doctest.h"
#include "subarray/geometry.hpp"

using namespace subarray;

namespace {

ElementLayout module4x4() { return build_subarray_layout(4, 4, 0.5, 0.6); }

// Brute force: does a module at p in pose q clear every placed module in some pose assignment?
bool brute_fits(const std::vector<Vec2>& centers, Vec2 p, Pose q, const ElementLayout& layout) {
  const std::size_t n = centers.size();
  for (std::size_t a = 0; a < (std::size_t{1} << n); ++a) {
    SuperArrayConfig c;
    c.centers = centers;
    for (std::size_t i = 0; i < n; ++i) c.poses.push_back((a >> i) & 1 ? Pose::Down : Pose::Up);
    if (!satisfies_aos(c, layout)) continue;
    c.centers.push_back(p);
    c.poses.push_back(q);
    if (satisfies_aos(c, layout)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("layout lattice") {
  const ElementLayout l = module4x4();
  REQUIRE(l.size() == 16);
  double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
  Vec2 sum;
  for (const Vec2& o : l.offsets) {
    xmin = std::min(xmin, o.x);
    xmax = std::max(xmax, o.x);
    ymin = std::min(ymin, o.y);
    ymax = std::max(ymax, o.y);
    sum += o;
    CHECK(l.footprint.contains(o));
  }
  CHECK(xmin == doctest::Approx(-0.75));
  CHECK(xmax == doctest::Approx(0.75));
  CHECK(ymin == doctest::Approx(-0.9));
  CHECK(ymax == doctest::Approx(0.9));
  CHECK(sum.norm() < 1e-12);
  CHECK(l.footprint.ymax == doctest::Approx(1.4));

  const ElementLayout one = build_subarray_layout(1, 1, 0.5, 0.5);
  REQUIRE(one.size() == 1);
  CHECK(one.offsets[0].norm() == 0.0);

  const ElementLayout l23 = build_subarray_layout(2, 3, 0.5, 0.5);
  Vec2 s;
  for (const Vec2& o : l23.offsets) s += o;
  CHECK(s.norm() < 1e-12);

  CHECK_THROWS_AS(build_subarray_layout(4, 4, 0.0, 0.6), InvalidArgument);
  CHECK_THROWS_AS(build_subarray_layout(0, 4, 0.5, 0.6), InvalidArgument);
}

TEST_CASE("expansion") {
  const ElementLayout l = module4x4();
  SuperArrayConfig one{{{0, 0}}, {Pose::Up}, {}};
  const auto d1 = expand_super_array(one, l);
  REQUIRE(d1.size() == 16);
  for (std::size_t i = 0; i < 16; ++i) CHECK((d1[i] - l.offsets[i]).norm() < 1e-15);

  SuperArrayConfig two{{{-5, 0}, {5, 0}}, {Pose::Up, Pose::Down}, {}};
  const auto d2 = expand_super_array(two, l);
  REQUIRE(d2.size() == 32);
  Vec2 sum;
  double mx = 0;
  for (const Vec2& d : d2) {
    sum += d;
    mx = std::max(mx, d.norm());
  }
  CHECK(sum.norm() <= 1e-12 * 32 * mx);

  // Compact tiling: 2 columns x 4 rows of modules form a 8x16 lattice.
  SuperArrayConfig compact;
  for (double y : {-3.6, -1.2, 1.2, 3.6})
    for (double x : {-1.0, 1.0}) {
      compact.centers.push_back({x, y});
      compact.poses.push_back(Pose::Up);
    }
  const auto dc = expand_unchecked(compact.centers, l);
  REQUIRE(dc.size() == 128);
  std::vector<double> xs, ys;
  for (const Vec2& d : dc) {
    xs.push_back(std::round(d.x / 0.5 * 2) / 2);
    ys.push_back(std::round(d.y / 0.6 * 2) / 2);
    CHECK(std::abs(d.x / 0.5 - std::round(d.x / 0.5 - 0.5) - 0.5) < 1e-9);
    CHECK(std::abs(d.y / 0.6 - std::round(d.y / 0.6 - 0.5) - 0.5) < 1e-9);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  CHECK(xs.size() == 8);
  CHECK(ys.size() == 16);

  SuperArrayConfig clash{{{0, 0}, {1, 0}}, {Pose::Up, Pose::Up}, {}};
  CHECK_THROWS_AS(expand_super_array(clash, l), ConstraintViolation);
}

TEST_CASE("shape signature") {
  const double a = 1.7;
  std::vector<Vec2> pair{{-a, 0}, {a, 0}};
  const ShapeSignature s2 = shape_signature(pair);
  CHECK(s2.lambda2 == doctest::Approx(a * a));
  CHECK(s2.lambda1 == doctest::Approx(0.0));
  CHECK(s2.psi == doctest::Approx(0.0));

  std::vector<Vec2> sq{{-a, -a}, {a, -a}, {a, a}, {-a, a}};
  const ShapeSignature s4 = shape_signature(sq);
  CHECK(s4.lambda1 == doctest::Approx(a * a));
  CHECK(s4.lambda2 == doctest::Approx(a * a));
  std::vector<double> dist;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) dist.push_back((sq[i] - sq[j]).norm());
  double m = 0, v = 0;
  for (double d : dist) m += d / 6;
  for (double d : dist) v += (d - m) * (d - m) / 6;
  CHECK(s4.psi == doctest::Approx(v).epsilon(1e-12));
  CHECK(v == doctest::Approx(8 * a * a * (3 - 2 * std::sqrt(2.0)) / 9).epsilon(1e-9));

  CHECK_THROWS_AS(shape_signature(std::vector<Vec2>{{0, 0}}), InvalidArgument);

  // Equal covariance, different psi.
  std::vector<Vec2> ring, cross;
  for (int k = 0; k < 8; ++k) ring.push_back({3 * std::cos(k * kPi / 4), 3 * std::sin(k * kPi / 4)});
  const double r = 3.0;
  cross = {{r, 0}, {-r, 0}, {0, r}, {0, -r}, {r, 0}, {-r, 0}, {0, r}, {0, -r}};
  const ShapeSignature sr = shape_signature(ring), sc = shape_signature(cross);
  CHECK(sr.lambda1 == doctest::Approx(sc.lambda1));
  CHECK(sr.lambda2 == doctest::Approx(sc.lambda2));
  CHECK(std::abs(sr.psi - sc.psi) > 0.1);
}

TEST_CASE("signature invariance") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-9, 9);
  for (int t = 0; t < 100; ++t) {
    std::vector<Vec2> c(6);
    for (auto& p : c) p = {U(rng), U(rng)};
    const ShapeSignature s = shape_signature(c);
    std::vector<Vec2> moved = c;
    const Vec2 shift{U(rng), U(rng)};
    for (auto& p : moved) p += shift;
    std::shuffle(moved.begin(), moved.end(), rng);
    const ShapeSignature t2 = shape_signature(moved);
    CHECK(t2.lambda1 == doctest::Approx(s.lambda1).epsilon(1e-9));
    CHECK(t2.lambda2 == doctest::Approx(s.lambda2).epsilon(1e-9));
    CHECK(t2.psi == doctest::Approx(s.psi).epsilon(1e-9));
    CHECK(s.lambda1 <= s.lambda2);
    CHECK(s.lambda1 >= 0);
  }
}

TEST_CASE("sym_eig2 eigenvectors") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int t = 0; t < 50; ++t) {
    const double a = U(rng), b = U(rng), c = U(rng);
    const SymEig2 e = sym_eig2(a, b, c);
    for (auto [lam, p] : {std::pair{e.lambda1, e.p1}, std::pair{e.lambda2, e.p2}}) {
      const Vec2 Ap{a * p.x + b * p.y, b * p.x + c * p.y};
      CHECK((Ap - p * lam).norm() < 1e-12);
      CHECK(p.norm() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("weyl bound") {
  CHECK(eigen_perturbation_bound(0.0, 8, 0.1) == doctest::Approx(0.0125));
  CHECK(eigen_perturbation_bound(3.0, 8, 0.0) == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-9.5, 9.5), H(-0.5, 0.5);
  std::uniform_int_distribution<int> pick(0, 7);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<Vec2> c(8);
    for (auto& p : c) p = {std::round(U(rng)) + 0.5, std::round(U(rng)) + 0.5};
    const ShapeSignature s = shape_signature(c);
    const int i = pick(rng);
    Vec2 mean;
    for (auto& p : c) mean += p * 0.125;
    const double R = (c[i] - mean).norm();
    std::vector<Vec2> m = c;
    const Vec2 delta{H(rng), H(rng)};
    m[i] += delta;
    const ShapeSignature sm = shape_signature(m);
    const double bound = eigen_perturbation_bound(R, 8, delta.norm());
    if (std::abs(sm.lambda1 - s.lambda1) > bound + 1e-12) ++violations;
    if (std::abs(sm.lambda2 - s.lambda2) > bound + 1e-12) ++violations;
    // Grid-cell form with pitch 1.
    CHECK(std::abs(sm.lambda2 - s.lambda2) <= (2 * R + 1) * std::sqrt(2.0) / 8 + 1e-12);
  }
  CHECK(violations == 0);
}

TEST_CASE("vacancy search against brute force") {
  const ElementLayout l = module4x4();
  const DesignGrid g = make_design_grid(20, 20, 1.0);
  REQUIRE(g.points.size() == 400);
  CHECK(g.points.front().x == doctest::Approx(-9.5));

  SuperArrayConfig empty;
  const auto all = vacancy_search(empty, g, l);
  CHECK(all.size() == 400);
  CHECK(std::all_of(all.begin(), all.end(), [](const Vacancy& v) { return v.poses == PoseSet::Free; }));

  SuperArrayConfig one{{{0.5, 0.5}}, {Pose::Up}, {}};
  const auto vac = vacancy_search(one, g, l);
  std::size_t k = 0;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    unsigned expect = 0;
    for (Pose q : {Pose::Up, Pose::Down}) {
      SuperArrayConfig c = one;
      c.centers.push_back(g.points[i]);
      c.poses.push_back(q);
      if (satisfies_aos(c, l)) expect |= 1u << static_cast<unsigned>(q);
    }
    if (expect == 0) continue;
    REQUIRE(k < vac.size());
    CHECK(vac[k].point_index == i);
    CHECK(static_cast<unsigned>(vac[k].poses) == expect);
    ++k;
  }
  CHECK(k == vac.size());
  CHECK(vac.size() < 400);
  CHECK(std::any_of(vac.begin(), vac.end(), [](const Vacancy& v) { return v.poses == PoseSet::Down; }));

  // Fully tiled small aperture.
  const DesignGrid tiny = make_design_grid(2, 3, 1.0);
  SuperArrayConfig block{{{0, 0}}, {Pose::Up}, {}};
  CHECK(vacancy_search(block, tiny, l).empty());
}

TEST_CASE("placement state tracks dormant poses") {
  const ElementLayout l = module4x4();
  const DesignGrid g = make_design_grid(20, 20, 1.0);
  std::mt19937_64 rng(5);
  for (int run = 0; run < 30; ++run) {
    std::uniform_int_distribution<std::size_t> pt(0, g.points.size() - 1);
    const std::size_t r0 = pt(rng);
    PlacementState s = PlacementState::root(static_cast<std::uint16_t>(r0), g.points[r0]);
    std::vector<Vec2> centers{g.points[r0]};
    for (int n = 1; n < 7; ++n) {
      const auto vac = s.vacancies(g, l);
      // Every grid point: probe agrees with brute-force pose enumeration.
      if (n <= 4) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < g.points.size(); ++i) {
          unsigned expect = 0;
          for (Pose q : {Pose::Up, Pose::Down})
            if (brute_fits(centers, g.points[i], q, l)) expect |= 1u << static_cast<unsigned>(q);
          if (expect == 0) continue;
          REQUIRE(k < vac.size());
          CHECK(vac[k].point_index == i);
          CHECK(static_cast<unsigned>(vac[k].poses) == expect);
          ++k;
        }
        CHECK(k == vac.size());
      }
      if (vac.empty()) break;
      std::uniform_int_distribution<std::size_t> pv(0, vac.size() - 1);
      const Vacancy& v = vac[pv(rng)];
      s = s.place(static_cast<std::uint16_t>(v.point_index), v.point, v.poses, l);
      centers.push_back(v.point);
      const SuperArrayConfig c = s.to_config(g.id);
      CHECK(satisfies_aos(c, l));
      for (std::size_t i = 0; i < s.size(); ++i) CHECK(allows(s.pose_state(i), c.poses[i]));
    }
  }
}

TEST_CASE("placement state beyond one word") {
  const ElementLayout l = module4x4();
  // 9 modules on a wide row: every pose is free, 2^9 assignments.
  PlacementState s = PlacementState::root(0, {0, 0});
  for (int i = 1; i < 9; ++i) s = s.place(0, {2.0 * i, 0}, PoseSet::Free, l);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.pose_state(i) == PoseSet::Free);
  // Above the last module: fits Up always, Down only if that module is Down.
  CHECK(s.probe({16.0, 2.5}, l) == PoseSet::Free);
  const PlacementState t = s.place(0, {16.0, 2.5}, PoseSet::Down, l);
  CHECK(satisfies_aos(t.to_config("x"), l));
  CHECK(t.pose_state(8) == PoseSet::Down);
  CHECK(t.pose_state(9) == PoseSet::Down);
  CHECK(t.pose_state(0) == PoseSet::Free);
}
