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

#include "subarray/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "subarray/benchmarks.hpp"
#include "subarray/bounds.hpp"
#include "subarray/rng.hpp"

namespace subarray {

namespace fs = std::filesystem;

namespace {

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw InvalidArgument("a seed is required (run.seed or --seed)");
  return *cfg.seed;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name, bool binary = false) {
  fs::create_directories(cfg.out_dir);
  const fs::path p = fs::path(cfg.out_dir) / name;
  std::ofstream f(p, binary ? std::ios::binary : std::ios::out);
  if (!f) throw InvalidArgument("cannot write " + p.string());
  if (!binary) f << output_header(cfg);
  return f;
}

void write_attr_table(const RunConfig& cfg, const std::string& name, const std::string& label,
                      const BeamAttributes& a, double cost) {
  std::ofstream f = open_out(cfg, name);
  f << "label,";
  write_attributes_csv_header(f);
  char buf[64];
  f << label << ',';
  write_attributes_csv_row(a, f);
  if (std::isfinite(cost)) {
    std::snprintf(buf, sizeof buf, "# cost=%.9f\n", cost);
    f << buf;
  }
}

std::vector<Vec2> resolve_elements(const RunConfig& cfg, std::ostream& log) {
  const ElementLayout layout = cfg.layout();
  const SuperArrayConfig arr = resolve_array(cfg, layout);
  log << "array: " << arr.size() << " subarrays, " << arr.size() * layout.size() << " elements\n";
  return expand_super_array(arr, layout);
}

}  // namespace

SuperArrayConfig resolve_array(const RunConfig& cfg, const ElementLayout& layout) {
  if (!cfg.array_file.empty()) return read_array_file(cfg.array_file);
  if (cfg.benchmark == "compact") return compact_benchmark(layout);
  if (cfg.benchmark == "naive") return naive_benchmark(layout, cfg.naive_bw);
  throw InvalidArgument("no array given (array.file or array.benchmark)");
}

void cmd_design(const RunConfig& cfg, std::ostream& log) {
  const std::uint64_t seed = require_seed(cfg);
  const ElementLayout layout = cfg.layout();
  const DesignGrid grid = cfg.grid();
  SearchOptions opt = cfg.search;
  opt.seed = seed;
  if (cfg.auto_tau) opt.tau = default_tau(grid, opt.n_subarrays);
  log << "grid " << grid.id << ", tau (" << opt.tau.lambda1 << ", " << opt.tau.lambda2 << ", " << opt.tau.psi << ")\n";

  const Dictionary dict = build_dictionary(grid, layout, opt);
  for (const LayerStats& l : dict.layers)
    log << "layer " << l.layer << ": " << l.children << " children, " << l.kept << " kept\n";
  const Selection sel = select_optimum(dict, cfg.weights, layout);
  log << "selected #" << sel.index << " cost " << sel.cost << " bw " << sel.attrs.bw_doa << " msll " << sel.attrs.msll
      << '\n';
  const Refinement ref = local_refine(sel.config, layout, grid.pitch, cfg.weights, dict.ranges, cfg.refine);
  log << "refined cost " << ref.cost << " bw " << ref.attrs.bw_doa << " msll " << ref.attrs.msll << '\n';
  const BeamAttributes full = beam_attributes(ref.config, layout, cfg.attributes);

  {
    std::ofstream f = open_out(cfg, "selected.txt");
    write_array(sel.config, f);
  }
  {
    std::ofstream f = open_out(cfg, "design.txt");
    write_array(ref.config, f);
  }
  {
    std::ofstream f = open_out(cfg, "trace.csv");
    write_trace_csv(ref.trace, f);
  }
  {
    std::ofstream f = open_out(cfg, "dictionary.jsonl");
    write_dictionary(dict, f);
  }
  char label[96];
  std::snprintf(label, sizeof label, "design(%g;%g;%g)", cfg.weights.alpha, cfg.weights.beta, cfg.weights.gamma);
  write_attr_table(cfg, "attributes.csv", label, full, ref.cost);
}

void cmd_attrs(const RunConfig& cfg, std::ostream& log) {
  require_seed(cfg);
  const ElementLayout layout = cfg.layout();
  const SuperArrayConfig arr = resolve_array(cfg, layout);
  const BeamAttributes a = beam_attributes(arr, layout, cfg.attributes);
  log << "bw_doa " << a.bw_doa << " msll " << a.msll << " ecc " << a.ecc << '\n';
  {
    std::ofstream f = open_out(cfg, "array.txt");
    write_array(arr, f);
  }
  write_attr_table(cfg, "attributes.csv", cfg.benchmark.empty() ? "array" : cfg.benchmark, a,
                   std::numeric_limits<double>::quiet_NaN());
  const PatternField ebp =
      evaluate_pattern(expand_super_array(arr, layout), cfg.attributes.n, expansion_factor(cfg.attributes.theta_max));
  std::ofstream f = open_out(cfg, "pattern.bin", true);
  write_pattern_binary(ebp, f);
}

void cmd_bounds(const RunConfig& cfg, std::ostream& log) {
  require_seed(cfg);
  const std::vector<Vec2> d = resolve_elements(cfg, log);
  const BoundCurve c = bound_curve(d, cfg.bound_snr_db);
  log << "ZZB threshold " << c.threshold_snr << " dB\n";
  std::ofstream f = open_out(cfg, "bounds.csv");
  char buf[64];
  std::snprintf(buf, sizeof buf, "# threshold_snr_db=%.4f\n", c.threshold_snr);
  f << buf;
  write_bound_csv(c, f);
}

void cmd_montecarlo(const RunConfig& cfg, std::ostream& log) {
  const std::uint64_t seed = require_seed(cfg);
  const std::vector<Vec2> d = resolve_elements(cfg, log);
  const SensingModel m(d);
  const double pitch = default_dictionary_pitch(d);
  const double radius = std::sin(cfg.search.theta_max * kPi / 180.0);
  const SteeringDictionary dict = make_dictionary(m, pitch, std::min(1.0, radius + pitch));
  CampaignOptions o = cfg.campaign;
  o.seed = derive_seed(seed, {20});
  const std::vector<CampaignPoint> pts = run_campaign(m, dict, o);
  for (const CampaignPoint& p : pts) log << "snr " << p.snr_db << " rmse " << p.rmse << '\n';
  {
    std::ofstream f = open_out(cfg, "rmse.csv");
    write_rmse_csv(pts, f);
  }
  std::vector<double> errors;
  for (const CampaignPoint& p : pts)
    if (p.snr_db == cfg.ccdf_snr_db) errors = p.errors;
  if (errors.empty()) {
    o.snr_db = {cfg.ccdf_snr_db};
    errors = run_campaign(m, dict, o).front().errors;
  }
  std::ofstream f = open_out(cfg, "ccdf.csv");
  write_ccdf_csv(metrics(errors), f);
}

void cmd_compressive(const RunConfig& cfg, std::ostream& log) {
  const std::uint64_t seed = require_seed(cfg);
  const ElementLayout layout = cfg.layout();
  const SuperArrayConfig arr = resolve_array(cfg, layout);
  const std::vector<Vec2> d = expand_super_array(arr, layout);
  const std::size_t ns = arr.size(), ne = layout.size();
  const SensingModel full(d);
  const double pitch = default_dictionary_pitch(d);
  const double radius = std::min(1.0, std::sin(cfg.search.theta_max * kPi / 180.0) + pitch);
  const SteeringDictionary fdict = make_dictionary(full, pitch, radius);

  {
    std::ofstream f = open_out(cfg, "isometry.csv");
    f << "m,m_i,min_db,max_db\n";
    char buf[96];
    for (int mi : cfg.isometry_mi) {
      const MeasurementMatrix mm =
          draw_measurement(ns, ne, std::vector<int>(ns, mi), derive_seed(seed, {30, static_cast<std::uint64_t>(mi)}));
      const IsometryRange r = isometry_ratio(mm.assemble(), fdict.S, cfg.sparsity, cfg.isometry_trials,
                                             derive_seed(seed, {31, static_cast<std::uint64_t>(mi)}));
      log << "M " << mm.rows() << ": [" << r.min_db << ", " << r.max_db << "] dB\n";
      std::snprintf(buf, sizeof buf, "%lld,%d,%.4f,%.4f\n", static_cast<long long>(mm.rows()), mi, r.min_db, r.max_db);
      f << buf;
    }
  }

  const std::vector<int> m_list =
      cfg.m_list.empty() ? std::vector<int>(ns, cfg.identity ? static_cast<int>(ne) : 4) : cfg.m_list;
  const MeasurementMatrix mm = draw_measurement(ns, ne, m_list, derive_seed(seed, {32}), cfg.identity);
  const SensingModel cm(d, mm.assemble());
  const SteeringDictionary cdict = make_dictionary(cm, pitch, radius);
  CampaignOptions o = cfg.campaign;
  o.seed = derive_seed(seed, {20});
  const std::vector<CampaignPoint> pts = run_campaign(cm, cdict, o);
  for (const CampaignPoint& p : pts) log << "snr " << p.snr_db << " rmse " << p.rmse << '\n';
  std::ofstream f = open_out(cfg, "compressive_rmse.csv");
  f << "# m=" << mm.rows() << '\n';
  write_rmse_csv(pts, f);
}

void run_command(const std::string& name, const RunConfig& cfg, std::ostream& log) {
  if (name == "design") cmd_design(cfg, log);
  else if (name == "attrs") cmd_attrs(cfg, log);
  else if (name == "bounds") cmd_bounds(cfg, log);
  else if (name == "montecarlo") cmd_montecarlo(cfg, log);
  else if (name == "compressive") cmd_compressive(cfg, log);
  else throw InvalidArgument("unknown command '" + name + "'");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalFailure*>(&e) || dynamic_cast<const DegenerateGeometry*>(&e)) return 3;
  if (dynamic_cast<const Error*>(&e)) return 2;
  return 1;
}

}  // namespace subarray
