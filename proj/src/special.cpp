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

#include "subarray/special.hpp"

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "subarray/types.hpp"

namespace subarray {

double marcum_q1(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw InvalidArgument("marcum_q1 needs a, b >= 0");
  if (b == 0.0) return 1.0;
  // Q_1(a, b) is the tail of a noncentral chi-square with 2 dof, centrality a^2
  const boost::math::non_central_chi_squared dist(2.0, a * a);
  return boost::math::cdf(boost::math::complement(dist, b * b));
}

double bessel_i0e(double x) {
  if (!(x >= 0.0)) throw InvalidArgument("bessel_i0e needs x >= 0");
  if (x < 500.0) return boost::math::cyl_bessel_i(0, x) * std::exp(-x);
  // asymptotic series, terms ((2k-1)!!)^2 / (k! (8x)^k)
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= (2.0 * k - 1) * (2.0 * k - 1) / (k * 8.0 * x);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * kPi * x);
}

}  // namespace subarray
