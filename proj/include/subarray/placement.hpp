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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "subarray/beampattern.hpp"
#include "subarray/geometry.hpp"

namespace subarray {

struct ObjectiveWeights {
  double alpha = 1.0;  // BW^DoA
  double beta = 1.0;   // MSLL
  double gamma = 1.0;  // ecc
};

struct Range {
  double min = 0.0;
  double max = 0.0;
};

struct ObjectiveRanges {
  Range bw;
  Range msll;
  Range ecc;
};

/// (raw - min) / (max - min), clamped to [0, 1].
double normalize_objective(double raw, Range r);

/// alpha BW + beta MSLL + gamma ecc on normalized values.
double weighted_cost(const BeamAttributes& a, const ObjectiveWeights& w, const ObjectiveRanges& r);

/// Bin resolution for (lambda1, lambda2, psi).
struct Tau {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double psi = 1.0;
};

/// Perturbation bound (2 R + 1) sqrt(2) pitch / N_s at R = half-diagonal of the aperture, on all three axes.
Tau default_tau(const DesignGrid& grid, std::size_t n_subarrays);

struct SearchOptions {
  std::size_t n_subarrays = 8;
  std::size_t n_init = 16;
  Tau tau;
  std::uint64_t seed = 1;
  int n_score = 256;   // EBP resolution while scoring the dictionary
  int n_final = 512;   // resolution for re-scoring and refinement
  std::size_t rescore_top = 32;
  double theta_max = 30.0;
  int eps = 2;
};

struct LayerStats {
  std::size_t layer = 0;
  std::size_t children = 0;
  std::size_t kept = 0;
};

struct Dictionary {
  std::vector<SuperArrayConfig> configs;
  std::vector<BeamAttributes> attrs;  // search attributes, no directivity
  ObjectiveRanges ranges;
  Tau tau;
  std::uint64_t seed = 0;
  std::string grid_id;
  SearchOptions options;
  std::vector<LayerStats> layers;
};

/// Breadth-first prefix-tree growth with one random survivor per signature bin.
/// Scoring runs in parallel over configurations; results do not depend on the thread count.
Dictionary build_dictionary(const DesignGrid& grid, const ElementLayout& layout, const SearchOptions& opt);

/// Growth stage alone (no scoring). Exposed for tests.
std::vector<SuperArrayConfig> grow_configurations(const DesignGrid& grid, const ElementLayout& layout,
                                                  const SearchOptions& opt, std::vector<LayerStats>* stats = nullptr);

/// Search attributes: analytic BW and ecc, MSLL from the expanded pattern at resolution `n`.
BeamAttributes search_attributes(const SuperArrayConfig& config, const ElementLayout& layout,
                                 const StructuredPattern& ebp, int eps);

/// Exact extrema of the search attributes.
ObjectiveRanges attribute_ranges(const std::vector<BeamAttributes>& attrs);

struct Selection {
  SuperArrayConfig config;
  BeamAttributes attrs;  // re-scored at opt.n_final
  double cost = 0.0;
  std::size_t index = 0;
};

/// Lowest weighted cost; ties by lower MSLL, lower ecc, then lexicographic centers.
/// The best `rescore_top` candidates are re-scored at the final resolution.
Selection select_optimum(const Dictionary& dict, const ObjectiveWeights& w, const ElementLayout& layout);

struct RefineOptions {
  int subgrid = 5;     // candidates per axis within one grid cell
  int rounds = 3;
  int n = 512;
  int eps = 2;
  double theta_max = 30.0;
};

struct TraceRow {
  int round = 0;
  int subarray = 0;
  double cost = 0.0;
  BeamAttributes attrs;
};

struct Refinement {
  SuperArrayConfig config;
  BeamAttributes attrs;
  double cost = 0.0;
  std::vector<TraceRow> trace;  // row 0 is the starting point
};

/// Cyclic per-subarray moves on a sub-grid of the original cell, accepted only if the cost does not rise.
Refinement local_refine(const SuperArrayConfig& config, const ElementLayout& layout, double pitch,
                        const ObjectiveWeights& w, const ObjectiveRanges& ranges, const RefineOptions& opt = {});

void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& os);

}  // namespace subarray
