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

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "subarray/beampattern.hpp"
#include "subarray/benchmarks.hpp"

using namespace subarray;

namespace {

ElementLayout module4x4() { return build_subarray_layout(4, 4, 0.5, 0.6); }

double dirichlet2(int n, double d, double u) {
  const double x = kPi * d * u;
  if (std::abs(std::sin(x)) < 1e-14) return 1.0;
  const double r = std::sin(n * x) / (n * std::sin(x));
  return r * r;
}

// Highest interior local maximum of a 1D function on [a, b] past its first null.
double first_sidelobe(int n, double d, double b) {
  double best = 0.0;
  const int m = 200000;
  double prev2 = dirichlet2(n, d, 0), prev = dirichlet2(n, d, b / m);
  bool past_null = false;
  for (int k = 2; k <= m; ++k) {
    const double cur = dirichlet2(n, d, b * k / m);
    if (cur > prev) past_null = true;
    if (past_null && prev >= prev2 && prev >= cur) best = std::max(best, prev);
    prev2 = prev;
    prev = cur;
  }
  return best;
}

std::vector<Vec2> random_array(std::mt19937_64& rng, int n, double span) {
  std::uniform_real_distribution<double> U(-span, span);
  std::vector<Vec2> d(n);
  for (auto& p : d) p = {U(rng), U(rng)};
  return d;
}

}  // namespace

TEST_CASE("single element pattern is flat") {
  const std::vector<Vec2> d{{0.3, -0.2}};
  const PatternField f = evaluate_pattern(d, 64, 1.5);
  for (double r : f.samples) CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(expansion_factor(30.0) == doctest::Approx(1.5));
}

TEST_CASE("URA pattern factorizes into Dirichlet kernels") {
  const ElementLayout l = module4x4();
  const PatternField f = evaluate_pattern(l.offsets, 128, 1.0);
  double worst = 0.0;
  for (int j = 0; j < f.n; ++j)
    for (int i = 0; i < f.n; ++i) {
      const double expect = dirichlet2(4, 0.5, f.coord(i)) * dirichlet2(4, 0.6, f.coord(j));
      worst = std::max(worst, std::abs(f.at(i, j) - expect));
    }
  CHECK(worst < 1e-12);
  CHECK(f.at(f.center(), f.center()) == 1.0);
}

TEST_CASE("fast, reference and structured kernels agree") {
  std::mt19937_64 rng(1);
  const std::vector<Vec2> d = random_array(rng, 40, 6.0);
  const PatternField a = evaluate_pattern(d, 64, 1.5);
  const PatternField b = evaluate_pattern_reference(d, 64, 1.5);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.samples.size(); ++k) worst = std::max(worst, std::abs(a.samples[k] - b.samples[k]));
  CHECK(worst < 1e-12);

  const ElementLayout l = module4x4();
  const SuperArrayConfig c = compact_benchmark(l);
  const StructuredPattern sp(l, 128, 1.5);
  const PatternField s = sp.evaluate(c.centers);
  const PatternField g = evaluate_pattern(expand_unchecked(c.centers, l), 128, 1.5);
  worst = 0.0;
  for (std::size_t k = 0; k < s.samples.size(); ++k) worst = std::max(worst, std::abs(s.samples[k] - g.samples[k]));
  CHECK(worst < 1e-12);
  CHECK(s.at(s.center(), s.center()) == 1.0);
}

TEST_CASE("pattern symmetry and range") {
  std::mt19937_64 rng(2);
  const std::vector<Vec2> d = random_array(rng, 24, 5.0);
  const PatternField f = evaluate_pattern(d, 64, 1.3);
  for (int j = 1; j < f.n; ++j)
    for (int i = 1; i < f.n; ++i) {
      CHECK(f.at(i, j) == doctest::Approx(f.at(f.n - i, f.n - j)).epsilon(1e-10));
      CHECK(f.at(i, j) >= 0.0);
      CHECK(f.at(i, j) <= 1.0);
    }
}

TEST_CASE("expanded pattern contains every steered pattern") {
  std::mt19937_64 rng(3);
  const std::vector<Vec2> d = random_array(rng, 30, 4.0);
  const double rho = expansion_factor(30.0);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < 200; ++t) {
    Vec2 u0{U(rng) * 0.5, U(rng) * 0.5};
    if (u0.norm() > 0.5) continue;
    Vec2 u{U(rng), U(rng)};
    if (u.norm() > 1.0) continue;
    // Steered power at u equals the expanded pattern at (u - u0) / rho, which lies in the unit disc.
    const Vec2 t_uv = (u - u0) * (1.0 / rho);
    CHECK(t_uv.norm() <= 1.0 + 1e-12);
    std::complex<double> s = 0.0;
    for (const Vec2& p : d) s += std::polar(1.0, kWavenumber * ((u - u0).dot(p)));
    const double steered = std::norm(s) / (d.size() * d.size());
    CHECK(steered == doctest::Approx(pattern_value(d, rho * t_uv.x, rho * t_uv.y)).epsilon(1e-10));
  }
}

TEST_CASE("MSLL") {
  SUBCASE("two elements at half wavelength have no sidelobe") {
    const std::vector<Vec2> d{{-0.25, 0}, {0.25, 0}};
    // 1D scan: cos^2 has no interior maximum on (0, 1].
    int peaks = 0;
    for (int k = 1; k < 9999; ++k) {
      const double a = pattern_value(d, (k - 1) / 1e4, 0), b = pattern_value(d, k / 1e4, 0),
                   c = pattern_value(d, (k + 1) / 1e4, 0);
      if (b > a && b > c) ++peaks;
    }
    CHECK(peaks == 0);
    CHECK_FALSE(extract_msll(evaluate_pattern(d, 128, 1.0)).has_value());
  }
  SUBCASE("single module matches the URA first sidelobe") {
    const ElementLayout l = module4x4();
    const double sl = std::max(first_sidelobe(4, 0.5, 1.0), first_sidelobe(4, 0.6, 1.0));
    const auto m = extract_msll(evaluate_pattern(l.offsets, 512, 1.0));
    REQUIRE(m.has_value());
    CHECK(*m == doctest::Approx(10 * std::log10(sl)).epsilon(0.02));
    AttributeOptions opt;
    opt.theta_max = 0.0;
    opt.with_directivity = false;
    const BeamAttributes a = beam_attributes(SuperArrayConfig{{{0, 0}}, {Pose::Up}, {}}, l, opt);
    CHECK(a.msll == doctest::Approx(*m));
  }
  SUBCASE("grid stability on the benchmarks") {
    const ElementLayout l = module4x4();
    for (const SuperArrayConfig& c : {compact_benchmark(l), naive_benchmark(l)}) {
      const std::vector<Vec2> d = expand_super_array(c, l);
      const double m512 = *extract_msll(evaluate_pattern(d, 512, 1.5));
      const double m1024 = *extract_msll(evaluate_pattern(d, 1024, 1.5));
      CHECK(std::abs(m512 - m1024) < 0.2);
    }
  }
}

TEST_CASE("mainlobe ellipse") {
  const ElementLayout l = module4x4();
  std::mt19937_64 rng(4);
  const std::vector<Vec2> d = random_array(rng, 50, 5.0);
  std::vector<Vec2> d2 = d;
  for (auto& p : d2) p = p * 2.0;
  const MainlobeEllipse e1 = mainlobe_ellipse(d), e2 = mainlobe_ellipse(d2);
  auto s = [](double bw) { return std::sin(bw * kPi / 360.0); };
  CHECK(s(e2.bw_max) / s(e1.bw_max) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s(e2.bw_min) / s(e1.bw_min) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(e2.bw_max < e1.bw_max);
  CHECK(e2.bw_min < e1.bw_min);
  CHECK(e1.bw_min <= e1.bw_max);

  std::vector<Vec2> sq;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) sq.push_back({i * 0.5, j * 0.5});
  CHECK(mainlobe_ellipse(sq).ecc == doctest::Approx(0.0).epsilon(1e-6));

  CHECK_THROWS_AS(mainlobe_ellipse(std::vector<Vec2>{{0, 0}, {1, 0}, {2, 0}}), DegenerateGeometry);

  const SuperArrayConfig c = compact_benchmark(l);
  const MainlobeEllipse fast = mainlobe_ellipse(c.centers, l);
  const MainlobeEllipse full = mainlobe_ellipse(expand_super_array(c, l));
  CHECK(fast.bw_max == doctest::Approx(full.bw_max).epsilon(1e-12));
  CHECK(fast.bw_min == doctest::Approx(full.bw_min).epsilon(1e-12));
  CHECK(fast.lambda1 == doctest::Approx(full.lambda1).epsilon(1e-12));

  // The quadratic contour sits inside the exact half-power cut, by a near-constant factor.
  for (const SuperArrayConfig& cfg : {compact_benchmark(l), naive_benchmark(l)}) {
    const std::vector<Vec2> dd = expand_super_array(cfg, l);
    const MainlobeEllipse e = mainlobe_ellipse(dd);
    const double rmax = hpbc_numeric(dd, e.axis_max) / e.bw_max;
    const double rmin = hpbc_numeric(dd, e.axis_min) / e.bw_min;
    CHECK(rmax > 1.05);
    CHECK(rmax < 1.2);
    CHECK(rmin > 1.05);
    CHECK(rmin < 1.2);
    CHECK(hpbc_numeric(dd, e.axis_max) >= hpbc_numeric(dd, e.axis_min));
  }
}

TEST_CASE("directivity") {
  const std::vector<Vec2> one{{0, 0}};
  CHECK(directivity(one) == doctest::Approx(0.0).epsilon(1e-9));

  // Hemisphere average of a planar array pattern: (1/N^2) sum_ij sinc(k |d_i - d_j|).
  auto closed_form = [](const std::vector<Vec2>& d) {
    double s = 0.0;
    for (const Vec2& a : d)
      for (const Vec2& b : d) {
        const double x = kWavenumber * (a - b).norm();
        s += x == 0.0 ? 1.0 : std::sin(x) / x;
      }
    return -10 * std::log10(s / (d.size() * d.size()));
  };
  // Dense (theta, phi) midpoint rule over the hemisphere.
  auto dense = [](const std::vector<Vec2>& d) {
    const int nt = 600, np = 1200;
    double s = 0.0;
    for (int a = 0; a < nt; ++a) {
      const double th = (a + 0.5) * (kPi / 2) / nt;
      for (int b = 0; b < np; ++b) {
        const double ph = (b + 0.5) * 2 * kPi / np;
        s += pattern_value(d, std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph)) * std::sin(th);
      }
    }
    s *= (kPi / 2 / nt) * (2 * kPi / np) / (2 * kPi);
    return -10 * std::log10(s);
  };
  const ElementLayout l = module4x4();
  const std::vector<Vec2> ura(l.offsets.begin(), l.offsets.end());
  const double g = directivity(ura);
  CHECK(g == doctest::Approx(dense(ura)).epsilon(0.1 / g));
  CHECK(g == doctest::Approx(closed_form(ura)).epsilon(1e-4));

  const std::vector<Vec2> d = expand_super_array(naive_benchmark(l), l);
  CHECK(directivity(d) == doctest::Approx(closed_form(d)).epsilon(1e-3));

  // Spreading the modules apart barely changes directivity.
  SuperArrayConfig near = compact_benchmark(l);
  SuperArrayConfig far = near;
  for (auto& c : far.centers) c = c * 2.0;
  const double gn = directivity(expand_super_array(near, l));
  const double gf = directivity(expand_super_array(far, l));
  CHECK(std::abs(gn - gf) < 0.5);
}

TEST_CASE("pattern export") {
  const ElementLayout l = module4x4();
  const PatternField f = evaluate_pattern(l.offsets, 64, 1.5);
  std::stringstream bin;
  write_pattern_binary(f, bin);
  CHECK(bin.str().size() == 16 + 64 * 64 * 4);
  const PatternField g = read_pattern_binary(bin);
  CHECK(g.n == 64);
  CHECK(g.rho == 1.5);
  for (std::size_t k = 0; k < f.samples.size(); ++k) CHECK(g.samples[k] == doctest::Approx(f.samples[k]).epsilon(1e-6));

  std::stringstream csv;
  write_pattern_csv(f, csv);
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 64 * 64 + 1);

  std::stringstream junk("XXXX");
  CHECK_THROWS_AS(read_pattern_binary(junk), ParseError);
}
