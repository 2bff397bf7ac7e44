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

#include <CLI11.hpp>
#include <iostream>
#include <sstream>
#include <omp.h>

#include "subarray/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Array-of-subarrays design and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir, array_file, benchmark;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", config_path, "INI configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides run.seed)");
  app.add_option("--out", out_dir, "output directory (overrides run.out)");
  app.add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
  app.add_option("--array", array_file, "array file (overrides array.file)");
  app.add_option("--benchmark", benchmark, "built-in array: compact | naive")
      ->check(CLI::IsMember({"compact", "naive"}));

  for (const char* name : {"design", "attrs", "bounds", "montecarlo", "compressive"}) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::istringstream none;
    subarray::RunConfig cfg = config_path.empty() ? subarray::parse_config(none) : subarray::load_config(config_path);
    if (*seed_opt) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!array_file.empty()) {
      cfg.array_file = array_file;
      cfg.benchmark.clear();
    }
    if (!benchmark.empty()) {
      cfg.benchmark = benchmark;
      cfg.array_file.clear();
    }
    if (threads > 0) omp_set_num_threads(threads);
    subarray::run_command(app.get_subcommands().front()->get_name(), cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return subarray::exit_code_for(e);
  }
  return 0;
}
