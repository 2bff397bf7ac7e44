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

#include "subarray/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "subarray/rng.hpp"

namespace subarray {

namespace pt = boost::property_tree;

ElementLayout RunConfig::layout() const { return build_subarray_layout(rows, cols, dx, dy, margin, overhang); }

DesignGrid RunConfig::grid() const { return make_design_grid(grid_width, grid_height, grid_pitch); }

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::string tok;
  std::istringstream is(s);
  while (std::getline(is, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = tok.find_last_not_of(" \t");
    tok = tok.substr(b, e - b + 1);
    // a:b:c is a range with step b
    if (tok.find(':') != std::string::npos) {
      double lo = 0, step = 0, hi = 0;
      char c1 = 0, c2 = 0;
      std::istringstream rs(tok);
      if (!(rs >> lo >> c1 >> step >> c2 >> hi) || c1 != ':' || c2 != ':' || !(step > 0) || hi < lo)
        throw InvalidArgument("bad range '" + tok + "'");
      const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
      for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
      continue;
    }
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad number '" + tok + "'");
    }
    if (used != tok.size()) throw InvalidArgument("bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

namespace {

std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_number_list(s)) {
    if (v != std::floor(v)) throw InvalidArgument("expected integers in '" + s + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

template <class T>
T get(const pt::ptree& t, const std::string& key, T fallback) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return fallback;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (*v == "true" || *v == "1" || *v == "yes") return true;
      if (*v == "false" || *v == "0" || *v == "no") return false;
      throw InvalidArgument("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      return *v;
    } else if constexpr (std::is_floating_point_v<T>) {
      std::size_t used = 0;
      const double d = std::stod(*v, &used);
      if (used != v->size()) throw InvalidArgument("");
      return static_cast<T>(d);
    } else {
      std::size_t used = 0;
      const long long d = std::stoll(*v, &used);
      if (used != v->size() || (std::is_unsigned_v<T> && d < 0)) throw InvalidArgument("");
      return static_cast<T>(d);
    }
  } catch (const std::exception&) {
    throw InvalidArgument("bad value for " + key + ": '" + *v + "'");
  }
}

const char* pose_name(Pose p) { return p == Pose::Up ? "up" : "down"; }

}  // namespace

RunConfig parse_config(std::istream& is) {
  pt::ptree t;
  try {
    pt::read_ini(is, t);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }
  static const std::vector<std::string> sections{"layout", "grid",   "weights",  "search",      "refine", "attributes",
                                                 "array",  "bounds", "scenario", "compressive", "run"};
  for (const auto& [k, v] : t)
    if (std::find(sections.begin(), sections.end(), k) == sections.end())
      throw InvalidArgument("unknown section or key '" + k + "'");

  RunConfig c;
  c.rows = get(t, "layout.rows", c.rows);
  c.cols = get(t, "layout.cols", c.cols);
  c.dx = get(t, "layout.dx", c.dx);
  c.dy = get(t, "layout.dy", c.dy);
  c.margin = get(t, "layout.margin", c.margin);
  c.overhang = get(t, "layout.overhang", c.overhang);

  c.grid_width = get(t, "grid.width", c.grid_width);
  c.grid_height = get(t, "grid.height", c.grid_height);
  c.grid_pitch = get(t, "grid.pitch", c.grid_pitch);

  c.weights.alpha = get(t, "weights.alpha", c.weights.alpha);
  c.weights.beta = get(t, "weights.beta", c.weights.beta);
  c.weights.gamma = get(t, "weights.gamma", c.weights.gamma);

  SearchOptions& s = c.search;
  s.n_subarrays = get(t, "search.n_subarrays", s.n_subarrays);
  s.n_init = get(t, "search.n_init", s.n_init);
  s.n_score = get(t, "search.n_score", s.n_score);
  s.n_final = get(t, "search.n_final", s.n_final);
  s.rescore_top = get(t, "search.rescore_top", s.rescore_top);
  s.theta_max = get(t, "search.theta_max", s.theta_max);
  s.eps = get(t, "search.eps", s.eps);
  const std::string tau = get<std::string>(t, "search.tau", "auto");
  if (tau != "auto") {
    const std::vector<double> v = parse_number_list(tau);
    if (v.size() == 1) s.tau = {v[0], v[0], v[0]};
    else if (v.size() == 3) s.tau = {v[0], v[1], v[2]};
    else throw InvalidArgument("search.tau needs 1 or 3 values");
    if (!(s.tau.lambda1 > 0 && s.tau.lambda2 > 0 && s.tau.psi > 0)) throw InvalidArgument("search.tau must be > 0");
    c.auto_tau = false;
  }

  c.refine.rounds = get(t, "refine.rounds", c.refine.rounds);
  c.refine.subgrid = get(t, "refine.subgrid", c.refine.subgrid);
  c.refine.n = get(t, "refine.n", s.n_final);
  c.refine.eps = s.eps;
  c.refine.theta_max = s.theta_max;

  c.attributes.n = get(t, "attributes.n", c.attributes.n);
  c.attributes.eps = get(t, "attributes.eps", s.eps);
  c.attributes.theta_max = s.theta_max;
  c.attributes.with_directivity = get(t, "attributes.directivity", c.attributes.with_directivity);

  c.array_file = get<std::string>(t, "array.file", "");
  c.benchmark = get<std::string>(t, "array.benchmark", "");
  if (!c.benchmark.empty() && c.benchmark != "compact" && c.benchmark != "naive")
    throw InvalidArgument("array.benchmark must be compact or naive");
  c.naive_bw = get(t, "array.naive_bw", c.naive_bw);

  c.bound_snr_db = parse_number_list(get<std::string>(t, "bounds.snr_db", "-30:1:30"));

  CampaignOptions& m = c.campaign;
  m.scenario.k = get(t, "scenario.k", m.scenario.k);
  m.scenario.primary_at_broadside = get(t, "scenario.primary_at_broadside", m.scenario.primary_at_broadside);
  m.scenario.min_sep = get(t, "scenario.min_sep", m.scenario.min_sep);
  m.scenario.interferer_db = get(t, "scenario.interferer_db", m.scenario.interferer_db);
  m.scenario.theta_max = s.theta_max;
  m.trials = get(t, "scenario.trials", m.trials);
  m.rounds = get(t, "scenario.rounds", m.rounds);
  m.snr_db = parse_number_list(get<std::string>(t, "scenario.snr_db", "-15:5:20"));
  c.ccdf_snr_db = get(t, "scenario.ccdf_snr_db", c.ccdf_snr_db);

  c.m_list = int_list(get<std::string>(t, "compressive.m_list", ""));
  c.isometry_mi = int_list(get<std::string>(t, "compressive.isometry_mi", "1,2,3,4,6,8"));
  c.isometry_trials = get(t, "compressive.isometry_trials", c.isometry_trials);
  c.sparsity = get(t, "compressive.sparsity", c.sparsity);
  c.identity = get(t, "compressive.identity", c.identity);

  if (t.get_optional<std::string>("run.seed")) c.seed = get<std::uint64_t>(t, "run.seed", 0);
  c.out_dir = get<std::string>(t, "run.out", c.out_dir);

  if (c.rows < 1 || c.cols < 1) throw InvalidArgument("layout needs rows, cols >= 1");
  if (c.campaign.trials < 1) throw InvalidArgument("scenario.trials must be >= 1");
  if (c.bound_snr_db.empty() || c.campaign.snr_db.empty()) throw InvalidArgument("empty SNR sweep");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open config '" + path + "'");
  return parse_config(f);
}

std::string canonical_config(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  auto list = [&](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::ostringstream e;
      e.precision(17);
      e << v[i];
      s += (i ? "," : "") + e.str();
    }
    return s;
  };
  const SearchOptions& s = c.search;
  os << "layout=" << c.rows << ',' << c.cols << ',' << c.dx << ',' << c.dy << ',' << c.margin << ',' << c.overhang << '\n'
     << "grid=" << c.grid_width << ',' << c.grid_height << ',' << c.grid_pitch << '\n'
     << "weights=" << c.weights.alpha << ',' << c.weights.beta << ',' << c.weights.gamma << '\n'
     << "search=" << s.n_subarrays << ',' << s.n_init << ',' << s.n_score << ',' << s.n_final << ',' << s.rescore_top
     << ',' << s.theta_max << ',' << s.eps << '\n'
     << "tau=" << (c.auto_tau ? std::string("auto") : list(std::vector<double>{s.tau.lambda1, s.tau.lambda2, s.tau.psi}))
     << '\n'
     << "refine=" << c.refine.rounds << ',' << c.refine.subgrid << ',' << c.refine.n << '\n'
     << "attributes=" << c.attributes.n << ',' << c.attributes.eps << ',' << c.attributes.with_directivity << '\n'
     << "array=" << c.array_file << ',' << c.benchmark << ',' << c.naive_bw << '\n'
     << "bounds=" << list(c.bound_snr_db) << '\n'
     << "scenario=" << c.campaign.scenario.k << ',' << c.campaign.scenario.primary_at_broadside << ','
     << c.campaign.scenario.min_sep << ',' << c.campaign.scenario.interferer_db << ',' << c.campaign.trials << ','
     << c.campaign.rounds << ',' << c.ccdf_snr_db << ';' << list(c.campaign.snr_db) << '\n'
     << "compressive=" << list(c.m_list) << ';' << list(c.isometry_mi) << ';' << c.isometry_trials << ','
     << c.sparsity << ',' << c.identity << '\n'
     << "seed=" << (c.seed ? std::to_string(*c.seed) : "none") << '\n';
  return os.str();
}

std::uint64_t config_hash(const RunConfig& c) {
  const std::string s = canonical_config(c);
  return fnv1a64(s.data(), s.size());
}

std::string output_header(const RunConfig& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# config_hash=%016llx seed=%llu\n", static_cast<unsigned long long>(config_hash(c)),
                static_cast<unsigned long long>(c.seed.value_or(0)));
  return buf;
}

SuperArrayConfig read_array(std::istream& is) {
  SuperArrayConfig c;
  std::string line;
  std::size_t no = 0;
  while (std::getline(is, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x = 0, y = 0;
    std::string pose, extra;
    if (!(ls >> x)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError("expected 'cx cy pose'", no);
    }
    if (!(ls >> y >> pose)) throw ParseError("expected 'cx cy pose'", no);
    if (ls >> extra) throw ParseError("trailing text '" + extra + "'", no);
    if (!std::isfinite(x) || !std::isfinite(y)) throw ParseError("non-finite coordinate", no);
    if (pose == "up" || pose == "u" || pose == "0") c.poses.push_back(Pose::Up);
    else if (pose == "down" || pose == "d" || pose == "1") c.poses.push_back(Pose::Down);
    else throw ParseError("unknown pose '" + pose + "'", no);
    c.centers.push_back({x, y});
  }
  if (c.centers.empty()) throw ParseError("array file has no subarrays", no);
  return c;
}

SuperArrayConfig read_array_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open array file '" + path + "'");
  return read_array(f);
}

void write_array(const SuperArrayConfig& c, std::ostream& os) {
  char buf[96];
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f %.6f %s\n", c.centers[i].x, c.centers[i].y, pose_name(c.poses[i]));
    os << buf;
  }
}

void write_dictionary(const Dictionary& d, std::ostream& os) {
  nlohmann::json h;
  h["size"] = d.configs.size();
  h["seed"] = d.seed;
  h["grid"] = d.grid_id;
  h["n_subarrays"] = d.options.n_subarrays;
  h["n_init"] = d.options.n_init;
  h["tau"] = {d.tau.lambda1, d.tau.lambda2, d.tau.psi};
  h["ranges"] = {{"bw", {d.ranges.bw.min, d.ranges.bw.max}},
                 {"msll", {d.ranges.msll.min, d.ranges.msll.max}},
                 {"ecc", {d.ranges.ecc.min, d.ranges.ecc.max}}};
  nlohmann::json layers = nlohmann::json::array();
  for (const LayerStats& l : d.layers) layers.push_back({l.layer, l.children, l.kept});
  h["layers"] = layers;
  os << h.dump() << '\n';
  for (std::size_t i = 0; i < d.configs.size(); ++i) {
    nlohmann::json r;
    const BeamAttributes& a = d.attrs[i];
    r["bw_doa"] = a.bw_doa;
    r["msll"] = std::isfinite(a.msll) ? nlohmann::json(a.msll) : nlohmann::json(nullptr);
    r["ecc"] = a.ecc;
    nlohmann::json cs = nlohmann::json::array();
    for (std::size_t k = 0; k < d.configs[i].size(); ++k)
      cs.push_back({d.configs[i].centers[k].x, d.configs[i].centers[k].y, pose_name(d.configs[i].poses[k])});
    r["centers"] = cs;
    os << r.dump() << '\n';
  }
}

}  // namespace subarray
