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

#include "subarray/benchmarks.hpp"

#include <cmath>

#include "subarray/beampattern.hpp"

namespace subarray {

SuperArrayConfig compact_benchmark(const ElementLayout& layout) {
  const double w = layout.cols * layout.dx;
  const double h = layout.rows * layout.dy;
  SuperArrayConfig c;
  for (int r = 0; r < 4; ++r)
    for (int q = 0; q < 2; ++q) {
      c.centers.push_back({(q - 0.5) * w, (r - 1.5) * h});
      c.poses.push_back(Pose::Up);
    }
  return c;
}

SuperArrayConfig diamond_config(double radius) {
  SuperArrayConfig c;
  const double h = 0.5 * radius;
  c.centers = {{radius, 0}, {h, h}, {0, radius}, {-h, h}, {-radius, 0}, {-h, -h}, {0, -radius}, {h, -h}};
  c.poses.assign(8, Pose::Up);
  return c;
}

double naive_radius(const ElementLayout& layout, double target_bw) {
  auto bw = [&](double r) {
    const SuperArrayConfig c = diamond_config(r);
    const MainlobeEllipse e = mainlobe_ellipse(c.centers, layout);
    return std::hypot(e.bw_max, e.bw_min);
  };
  double lo = 0.5, hi = 50.0;
  if (!(bw(lo) > target_bw && bw(hi) < target_bw)) throw InvalidArgument("target beamwidth out of reach");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bw(mid) > target_bw ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SuperArrayConfig naive_benchmark(const ElementLayout& layout, double target_bw) {
  SuperArrayConfig c = diamond_config(naive_radius(layout, target_bw));
  if (!satisfies_aos(c, layout)) throw InfeasibleInstance("diamond radius too small for the module footprint");
  return c;
}

}  // namespace subarray
