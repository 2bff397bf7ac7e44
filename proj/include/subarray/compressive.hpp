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

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "subarray/estimation.hpp"

namespace subarray {

/// Block-diagonal Phi, one M_i x N_e block per subarray, element order as in expand_super_array.
struct MeasurementMatrix {
  std::vector<Eigen::MatrixXcd> blocks;
  std::vector<int> m_list;
  std::size_t n_e = 0;
  std::uint64_t seed = 0;
  bool identity = false;

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  Eigen::MatrixXcd assemble() const;
};

/// QPSK entries (1/sqrt(M_i)){+-1, +-j}, then unit-norm columns. `identity` forces Phi_i = I (needs M_i = N_e).
MeasurementMatrix draw_measurement(std::size_t n_s, std::size_t n_e, const std::vector<int>& m_list,
                                   std::uint64_t seed, bool identity = false);

struct IsometryRange {
  double min_db = 0.0;
  double max_db = 0.0;
};

/// Extremes of 10 log10(||Phi S b||^2 / ||S b||^2) over random `sparsity`-sparse complex Gaussian b.
/// `S` holds element-domain steering vectors as columns.
IsometryRange isometry_ratio(const Eigen::MatrixXcd& phi, const Eigen::MatrixXcd& S, std::size_t sparsity,
                             std::size_t trials, std::uint64_t seed);

/// NOMP on y = Phi x with Phi-composed responses; `m` must carry Phi.
EstimationResult compressive_nomp(const SensingModel& m, const SteeringDictionary& dict, const Eigen::VectorXcd& y,
                                  const NompOptions& opt);

}  // namespace subarray
