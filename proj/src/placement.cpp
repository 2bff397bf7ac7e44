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

#include "subarray/placement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include <omp.h>

#include "subarray/rng.hpp"

namespace subarray {

double normalize_objective(double raw, Range r) {
  if (!(r.max > r.min)) throw InvalidArgument("objective is constant over the dictionary");
  return std::clamp((raw - r.min) / (r.max - r.min), 0.0, 1.0);
}

double weighted_cost(const BeamAttributes& a, const ObjectiveWeights& w, const ObjectiveRanges& r) {
  if (w.alpha < 0.0 || w.beta < 0.0 || w.gamma < 0.0) throw InvalidArgument("weights must be non-negative");
  if (w.alpha + w.beta + w.gamma <= 0.0) throw InvalidArgument("all weights are zero");
  double c = 0.0;
  if (w.alpha > 0.0) c += w.alpha * normalize_objective(a.bw_doa, r.bw);
  if (w.beta > 0.0) c += w.beta * normalize_objective(a.msll, r.msll);
  if (w.gamma > 0.0) c += w.gamma * normalize_objective(a.ecc, r.ecc);
  return c;
}

Tau default_tau(const DesignGrid& grid, std::size_t n_subarrays) {
  if (n_subarrays < 1) throw InvalidArgument("need at least one subarray");
  const double r = 0.5 * std::hypot(grid.extent.width(), grid.extent.height());
  const double t = (2.0 * r + 1.0) * std::sqrt(2.0) * grid.pitch / static_cast<double>(n_subarrays);
  return {t, t, t};
}

namespace {

using BinKey = std::array<std::int64_t, 3>;

struct BinHash {
  std::size_t operator()(const BinKey& k) const {
    return static_cast<std::size_t>(splitmix64(static_cast<std::uint64_t>(k[0]) ^
                                               splitmix64(static_cast<std::uint64_t>(k[1]) ^
                                                          splitmix64(static_cast<std::uint64_t>(k[2])))));
  }
};

struct Candidate {
  std::uint64_t priority = 0;
  std::uint32_t parent = 0;
  std::uint32_t point = 0;
  PoseSet poses = PoseSet::None;

  bool before(const Candidate& o) const {
    if (priority != o.priority) return priority < o.priority;
    if (parent != o.parent) return parent < o.parent;
    return point < o.point;
  }
};

BinKey bin_of(const ShapeSignature& s, const Tau& tau) {
  return {static_cast<std::int64_t>(std::floor(s.lambda1 / tau.lambda1)),
          static_cast<std::int64_t>(std::floor(s.lambda2 / tau.lambda2)),
          static_cast<std::int64_t>(std::floor(s.psi / tau.psi))};
}

// Running sums for the signature of a parent plus one more center.
struct Moments {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0, sl = 0, sl2 = 0;
  std::size_t n = 0, pairs = 0;

  explicit Moments(const std::vector<Vec2>& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      add_point(c[i]);
      for (std::size_t j = 0; j < i; ++j) add_pair((c[i] - c[j]).norm());
    }
  }
  void add_point(Vec2 p) {
    sx += p.x;
    sy += p.y;
    sxx += p.x * p.x;
    sxy += p.x * p.y;
    syy += p.y * p.y;
    ++n;
  }
  void add_pair(double l) {
    sl += l;
    sl2 += l * l;
    ++pairs;
  }
  ShapeSignature with(Vec2 p, const std::vector<Vec2>& c) const {
    Moments m = *this;
    m.add_point(p);
    for (const Vec2& q : c) m.add_pair((p - q).norm());
    const double inv = 1.0 / static_cast<double>(m.n);
    const double mx = m.sx * inv, my = m.sy * inv;
    const SymEig2 e = sym_eig2(m.sxx * inv - mx * mx, m.sxy * inv - mx * my, m.syy * inv - my * my);
    const double ml = m.sl / static_cast<double>(m.pairs);
    ShapeSignature s;
    s.lambda1 = std::max(0.0, e.lambda1);
    s.lambda2 = std::max(s.lambda1, e.lambda2);
    s.psi = std::max(0.0, m.sl2 / static_cast<double>(m.pairs) - ml * ml);
    return s;
  }
};

bool lex_less(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](Vec2 p, Vec2 q) {
    return p.x != q.x ? p.x < q.x : p.y < q.y;
  });
}

// Strict ordering for selection: cost, then MSLL, ecc, centers.
bool ranks_before(double ca, const BeamAttributes& a, const std::vector<Vec2>& pa, double cb,
                  const BeamAttributes& b, const std::vector<Vec2>& pb) {
  if (ca != cb) return ca < cb;
  if (a.msll != b.msll) return a.msll < b.msll;
  if (a.ecc != b.ecc) return a.ecc < b.ecc;
  return lex_less(pa, pb);
}

}  // namespace

std::vector<SuperArrayConfig> grow_configurations(const DesignGrid& grid, const ElementLayout& layout,
                                                  const SearchOptions& opt, std::vector<LayerStats>* stats) {
  if (opt.n_subarrays < 2) throw InvalidArgument("dictionary search needs at least two subarrays");
  if (opt.n_subarrays > PlacementState::kMaxModules) throw InvalidArgument("too many subarrays for pose tracking");
  if (opt.n_init < 1) throw InvalidArgument("need at least one root");
  if (!(opt.tau.lambda1 > 0.0 && opt.tau.lambda2 > 0.0 && opt.tau.psi > 0.0))
    throw InvalidArgument("bin resolution must be positive");
  if (grid.points.empty()) throw InfeasibleInstance("empty design grid");

  std::vector<std::uint32_t> order(grid.points.size());
  std::iota(order.begin(), order.end(), 0u);
  auto rng = make_rng(opt.seed, {0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t roots = std::min(opt.n_init, order.size());
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(roots));

  std::vector<PlacementState> parents;
  for (std::size_t r = 0; r < roots; ++r)
    parents.push_back(PlacementState::root(static_cast<std::uint16_t>(order[r]), grid.points[order[r]]));
  if (stats) stats->push_back({1, roots, roots});

  for (std::size_t layer = 2; layer <= opt.n_subarrays; ++layer) {
    using Bins = std::unordered_map<BinKey, Candidate, BinHash>;
    std::vector<Bins> local(static_cast<std::size_t>(omp_get_max_threads()));
    std::vector<std::size_t> counts(local.size(), 0);
    const std::int64_t np = static_cast<std::int64_t>(parents.size());
#pragma omp parallel
    {
      Bins& bins = local[static_cast<std::size_t>(omp_get_thread_num())];
      std::size_t& count = counts[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 4)
      for (std::int64_t p = 0; p < np; ++p) {
        const PlacementState& parent = parents[static_cast<std::size_t>(p)];
        const Moments base(parent.centers());
        for (const Vacancy& v : parent.vacancies(grid, layout)) {
          const BinKey key = bin_of(base.with(v.point, parent.centers()), opt.tau);
          const Candidate c{derive_seed(opt.seed, {layer, static_cast<std::uint64_t>(p), v.point_index}),
                            static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(v.point_index), v.poses};
          ++count;
          auto [it, fresh] = bins.try_emplace(key, c);
          if (!fresh && c.before(it->second)) it->second = c;
        }
      }
    }
    Bins merged = std::move(local[0]);
    for (std::size_t t = 1; t < local.size(); ++t)
      for (const auto& [key, c] : local[t]) {
        auto [it, fresh] = merged.try_emplace(key, c);
        if (!fresh && c.before(it->second)) it->second = c;
      }
    std::vector<std::pair<BinKey, Candidate>> winners(merged.begin(), merged.end());
    std::sort(winners.begin(), winners.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<PlacementState> children;
    children.reserve(winners.size());
    for (const auto& [key, c] : winners)
      children.push_back(parents[c.parent].place(static_cast<std::uint16_t>(c.point), grid.points[c.point], c.poses,
                                                 layout));
    if (stats) stats->push_back({layer, std::accumulate(counts.begin(), counts.end(), std::size_t{0}), children.size()});
    if (children.empty()) throw InfeasibleInstance("grid too small for the requested number of subarrays");
    parents = std::move(children);
  }

  std::vector<SuperArrayConfig> out;
  out.reserve(parents.size());
  for (const PlacementState& s : parents) out.push_back(s.to_config(grid.id));
  return out;
}

BeamAttributes search_attributes(const SuperArrayConfig& config, const ElementLayout& layout,
                                 const StructuredPattern& ebp, int eps) {
  const MainlobeEllipse e = mainlobe_ellipse(config.centers, layout);
  BeamAttributes a;
  a.bw_max = e.bw_max;
  a.bw_min = e.bw_min;
  a.bw_doa = std::hypot(e.bw_max, e.bw_min);
  a.ecc = e.ecc;
  a.msll = extract_msll(ebp.evaluate(config.centers), eps).value_or(-std::numeric_limits<double>::infinity());
  a.directivity = std::numeric_limits<double>::quiet_NaN();
  return a;
}

ObjectiveRanges attribute_ranges(const std::vector<BeamAttributes>& attrs) {
  const double inf = std::numeric_limits<double>::infinity();
  ObjectiveRanges r{{inf, -inf}, {inf, -inf}, {inf, -inf}};
  auto grow = [](Range& g, double v) {
    if (!std::isfinite(v)) return;
    g.min = std::min(g.min, v);
    g.max = std::max(g.max, v);
  };
  for (const BeamAttributes& a : attrs) {
    grow(r.bw, a.bw_doa);
    grow(r.msll, a.msll);
    grow(r.ecc, a.ecc);
  }
  return r;
}

Dictionary build_dictionary(const DesignGrid& grid, const ElementLayout& layout, const SearchOptions& opt) {
  Dictionary d;
  d.options = opt;
  d.tau = opt.tau;
  d.seed = opt.seed;
  d.grid_id = grid.id;
  d.configs = grow_configurations(grid, layout, opt, &d.layers);
  d.attrs.resize(d.configs.size());
  const StructuredPattern ebp(layout, opt.n_score, expansion_factor(opt.theta_max));
  const std::int64_t n = static_cast<std::int64_t>(d.configs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i)
    d.attrs[static_cast<std::size_t>(i)] = search_attributes(d.configs[static_cast<std::size_t>(i)], layout, ebp, opt.eps);
  d.ranges = attribute_ranges(d.attrs);
  return d;
}

Selection select_optimum(const Dictionary& dict, const ObjectiveWeights& w, const ElementLayout& layout) {
  if (dict.configs.empty()) throw InvalidArgument("empty dictionary");
  const std::size_t n = dict.configs.size();
  std::vector<double> cost(n);
  for (std::size_t i = 0; i < n; ++i) cost[i] = weighted_cost(dict.attrs[i], w, dict.ranges);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto by_rank = [&](const std::vector<double>& c, const std::vector<BeamAttributes>& a) {
    return [&](std::size_t x, std::size_t y) {
      return ranks_before(c[x], a[x], dict.configs[x].centers, c[y], a[y], dict.configs[y].centers);
    };
  };
  const std::size_t top = std::min(n, std::max<std::size_t>(1, dict.options.rescore_top));
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(top), idx.end(), by_rank(cost, dict.attrs));
  idx.resize(top);

  const StructuredPattern fine(layout, dict.options.n_final, expansion_factor(dict.options.theta_max));
  std::vector<BeamAttributes> attrs = dict.attrs;
  std::vector<double> fcost = cost;
  const std::int64_t m = static_cast<std::int64_t>(top);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < m; ++k) {
    const std::size_t i = idx[static_cast<std::size_t>(k)];
    attrs[i] = search_attributes(dict.configs[i], layout, fine, dict.options.eps);
    fcost[i] = weighted_cost(attrs[i], w, dict.ranges);
  }
  const std::size_t best = *std::min_element(idx.begin(), idx.end(), by_rank(fcost, attrs));
  return {dict.configs[best], attrs[best], fcost[best], best};
}

Refinement local_refine(const SuperArrayConfig& config, const ElementLayout& layout, double pitch,
                        const ObjectiveWeights& w, const ObjectiveRanges& ranges, const RefineOptions& opt) {
  if (!satisfies_aos(config, layout)) throw ConstraintViolation("starting configuration overlaps");
  if (opt.subgrid < 2 || opt.rounds < 0) throw InvalidArgument("bad refinement lattice");
  const StructuredPattern ebp(layout, opt.n, expansion_factor(opt.theta_max));
  const double step = pitch / (opt.subgrid - 1);
  const int half = (opt.subgrid - 1) / 2;
  std::vector<Vec2> offsets;
  for (int b = 0; b < opt.subgrid; ++b)
    for (int a = 0; a < opt.subgrid; ++a) offsets.push_back({(a - half) * step, (b - half) * step});

  Refinement out;
  out.config = config;
  out.attrs = search_attributes(config, layout, ebp, opt.eps);
  out.cost = weighted_cost(out.attrs, w, ranges);
  out.trace.push_back({0, -1, out.cost, out.attrs});
  const std::vector<Vec2> origin = config.centers;

  for (int round = 1; round <= opt.rounds; ++round) {
    for (std::size_t i = 0; i < config.size(); ++i) {
      std::vector<double> cand_cost(offsets.size(), std::numeric_limits<double>::infinity());
      std::vector<BeamAttributes> cand_attrs(offsets.size());
      std::vector<Pose> cand_pose(offsets.size(), out.config.poses[i]);
      const std::int64_t m = static_cast<std::int64_t>(offsets.size());
#pragma omp parallel for schedule(dynamic, 1)
      for (std::int64_t k = 0; k < m; ++k) {
        SuperArrayConfig c = out.config;
        c.centers[i] = origin[i] + offsets[static_cast<std::size_t>(k)];
        if (c.centers[i] == out.config.centers[i]) continue;
        const Pose keep = c.poses[i];
        bool ok = false;
        for (Pose q : {keep, keep == Pose::Up ? Pose::Down : Pose::Up}) {
          c.poses[i] = q;
          if (satisfies_aos(c, layout)) {
            ok = true;
            break;
          }
        }
        if (!ok) continue;
        const std::size_t kk = static_cast<std::size_t>(k);
        cand_attrs[kk] = search_attributes(c, layout, ebp, opt.eps);
        cand_cost[kk] = weighted_cost(cand_attrs[kk], w, ranges);
        cand_pose[kk] = c.poses[i];
      }
      std::size_t best = offsets.size();
      double best_cost = out.cost;
      for (std::size_t k = 0; k < offsets.size(); ++k)
        if (cand_cost[k] < best_cost) {
          best_cost = cand_cost[k];
          best = k;
        }
      if (best < offsets.size()) {
        out.config.centers[i] = origin[i] + offsets[best];
        out.config.poses[i] = cand_pose[best];
        out.config.grid_id.reset();
        out.attrs = cand_attrs[best];
        out.cost = best_cost;
      }
      out.trace.push_back({round, static_cast<int>(i), out.cost, out.attrs});
    }
  }
  return out;
}

void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& os) {
  os << "step,round,subarray,cost,bw_doa,msll,ecc\n";
  char buf[192];
  for (std::size_t s = 0; s < trace.size(); ++s) {
    const TraceRow& t = trace[s];
    std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.9f,%.6f,%.6f,%.6f\n", s, t.round, t.subarray, t.cost, t.attrs.bw_doa,
                  t.attrs.msll, t.attrs.ecc);
    os << buf;
  }
}

}  // namespace subarray
