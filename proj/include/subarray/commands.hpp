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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "subarray/io.hpp"

namespace subarray {

/// Array named by the config: array.file, else the array.benchmark generator.
SuperArrayConfig resolve_array(const RunConfig& cfg, const ElementLayout& layout);

// Each command writes its files under cfg.out_dir and logs progress to `log`.
void cmd_design(const RunConfig& cfg, std::ostream& log);
void cmd_attrs(const RunConfig& cfg, std::ostream& log);
void cmd_bounds(const RunConfig& cfg, std::ostream& log);
void cmd_montecarlo(const RunConfig& cfg, std::ostream& log);
void cmd_compressive(const RunConfig& cfg, std::ostream& log);

/// Dispatch by name; throws InvalidArgument for an unknown command.
void run_command(const std::string& name, const RunConfig& cfg, std::ostream& log);

/// Exit code for an exception: 2 for configuration problems, 3 for numerical failures, 1 otherwise.
int exit_code_for(const std::exception& e);

}  // namespace subarray
