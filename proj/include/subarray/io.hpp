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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "subarray/compressive.hpp"
#include "subarray/estimation.hpp"
#include "subarray/placement.hpp"

namespace subarray {

/// Everything a batch run needs. Loaded from an INI file; see README for keys.
/// Defaults come from parse_config on an empty file, not from the member initializers.
struct RunConfig {
  // [layout]
  int rows = 4;
  int cols = 4;
  double dx = 0.5;
  double dy = 0.6;
  double margin = 0.0;
  double overhang = 0.5;
  // [grid]
  double grid_width = 20.0;
  double grid_height = 20.0;
  double grid_pitch = 1.0;
  // [weights]
  ObjectiveWeights weights;
  // [search]
  SearchOptions search;
  bool auto_tau = true;
  // [refine]
  RefineOptions refine;
  // [attributes]
  AttributeOptions attributes;
  // [array]
  std::string array_file;
  std::string benchmark;  // compact | naive
  double naive_bw = 7.9;
  // [bounds]
  std::vector<double> bound_snr_db;
  // [scenario]
  CampaignOptions campaign;
  double ccdf_snr_db = -5.0;
  // [compressive]
  std::vector<int> m_list;
  std::vector<int> isometry_mi;
  std::size_t isometry_trials = 100000;
  std::size_t sparsity = 8;
  bool identity = false;
  // [run]
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";

  ElementLayout layout() const;
  DesignGrid grid() const;
};

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Canonical key = value dump; the config hash is FNV-1a over it.
std::string canonical_config(const RunConfig& c);
std::uint64_t config_hash(const RunConfig& c);

/// "# config_hash=<16 hex> seed=<n>".
std::string output_header(const RunConfig& c);

/// Array files: one "cx cy pose" line per subarray, pose up|down; '#' starts a comment.
SuperArrayConfig read_array(std::istream& is);
SuperArrayConfig read_array_file(const std::string& path);
void write_array(const SuperArrayConfig& c, std::ostream& os);

/// JSON lines: a header object, then one object per configuration.
void write_dictionary(const Dictionary& d, std::ostream& os);

std::vector<double> parse_number_list(const std::string& s);

}  // namespace subarray
