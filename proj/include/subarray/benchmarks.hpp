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

#include "subarray/geometry.hpp"

namespace subarray {

/// Modules tiled edge to edge, 2 columns by 4 rows, so the elements form one
/// uniform rectangular lattice.
SuperArrayConfig compact_benchmark(const ElementLayout& layout);

/// Four vertices (+-r, 0), (0, +-r) and the four edge midpoints of the diamond.
SuperArrayConfig diamond_config(double radius);

/// Diamond whose analytic BW^DoA equals `target_bw` (degrees), radius found by bisection.
SuperArrayConfig naive_benchmark(const ElementLayout& layout, double target_bw = 7.9);
double naive_radius(const ElementLayout& layout, double target_bw);

}  // namespace subarray
