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

#include "subarray/compressive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "subarray/rng.hpp"

namespace subarray {

Eigen::Index MeasurementMatrix::rows() const {
  return std::accumulate(m_list.begin(), m_list.end(), Eigen::Index{0});
}

Eigen::Index MeasurementMatrix::cols() const { return static_cast<Eigen::Index>(blocks.size() * n_e); }

Eigen::MatrixXcd MeasurementMatrix::assemble() const {
  Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(rows(), cols());
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    phi.block(r, static_cast<Eigen::Index>(i * n_e), blocks[i].rows(), blocks[i].cols()) = blocks[i];
    r += blocks[i].rows();
  }
  return phi;
}

MeasurementMatrix draw_measurement(std::size_t n_s, std::size_t n_e, const std::vector<int>& m_list,
                                   std::uint64_t seed, bool identity) {
  if (n_s < 1 || n_e < 1) throw InvalidArgument("empty measurement geometry");
  if (m_list.size() != n_s) throw InvalidArgument("need one M_i per subarray");
  MeasurementMatrix out;
  out.m_list = m_list;
  out.n_e = n_e;
  out.seed = seed;
  out.identity = identity;
  const Eigen::Index ne = static_cast<Eigen::Index>(n_e);
  for (std::size_t i = 0; i < n_s; ++i) {
    const int mi = m_list[i];
    if (mi < 1 || mi > static_cast<int>(n_e)) throw InvalidArgument("M_i must lie in [1, N_e]");
    if (identity) {
      if (mi != static_cast<int>(n_e)) throw InvalidArgument("identity sensing needs M_i = N_e");
      out.blocks.push_back(Eigen::MatrixXcd::Identity(ne, ne));
      continue;
    }
    std::mt19937_64 rng = make_rng(seed, {i});
    std::uniform_int_distribution<int> sym(0, 3);
    const double s = 1.0 / std::sqrt(static_cast<double>(mi));
    const cd alphabet[4] = {cd(s, 0), cd(-s, 0), cd(0, s), cd(0, -s)};
    Eigen::MatrixXcd b(mi, ne);
    for (Eigen::Index c = 0; c < ne; ++c)
      for (Eigen::Index r = 0; r < mi; ++r) b(r, c) = alphabet[sym(rng)];
    for (Eigen::Index c = 0; c < ne; ++c) b.col(c) /= b.col(c).norm();
    out.blocks.push_back(std::move(b));
  }
  return out;
}

IsometryRange isometry_ratio(const Eigen::MatrixXcd& phi, const Eigen::MatrixXcd& S, std::size_t sparsity,
                             std::size_t trials, std::uint64_t seed) {
  const Eigen::Index g = S.cols();
  if (phi.cols() != S.rows()) throw InvalidArgument("Phi and steering matrix do not match");
  if (sparsity < 1 || static_cast<Eigen::Index>(sparsity) > g) throw InvalidArgument("sparsity exceeds dictionary size");
  if (trials < 1) throw InvalidArgument("need at least one trial");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const std::int64_t nt = static_cast<std::int64_t>(trials);
#pragma omp parallel
  {
    double tlo = std::numeric_limits<double>::infinity(), thi = -tlo;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(g));
#pragma omp for schedule(static)
    for (std::int64_t t = 0; t < nt; ++t) {
      std::mt19937_64 rng = make_rng(seed, {static_cast<std::uint64_t>(t)});
      std::iota(idx.begin(), idx.end(), Eigen::Index{0});
      // partial Fisher-Yates: first `sparsity` entries form the support
      for (std::size_t k = 0; k < sparsity; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
        std::swap(idx[k], idx[pick(rng)]);
      }
      std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(S.rows());
      for (std::size_t k = 0; k < sparsity; ++k) {
        const double re = n01(rng);
        const double im = n01(rng);
        v += cd(re, im) * S.col(idx[k]);
      }
      const double den = v.squaredNorm();
      if (den <= 0.0) continue;
      const double r = 10.0 * std::log10((phi * v).squaredNorm() / den);
      tlo = std::min(tlo, r);
      thi = std::max(thi, r);
    }
#pragma omp critical
    {
      lo = std::min(lo, tlo);
      hi = std::max(hi, thi);
    }
  }
  return {lo, hi};
}

EstimationResult compressive_nomp(const SensingModel& m, const SteeringDictionary& dict, const Eigen::VectorXcd& y,
                                  const NompOptions& opt) {
  if (!m.compressed()) throw InvalidArgument("model carries no measurement matrix");
  return nomp(m, dict, y, opt);
}

}  // namespace subarray
