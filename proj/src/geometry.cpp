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

#include "subarray/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace subarray {

ElementLayout build_subarray_layout(int rows, int cols, double dx, double dy, double margin, double overhang) {
  if (rows < 1 || cols < 1) throw InvalidArgument("subarray needs at least one row and one column");
  if (!(dx > 0.0) || !(dy > 0.0)) throw InvalidArgument("element spacing must be positive");
  if (margin < 0.0 || overhang < 0.0) throw InvalidArgument("footprint margin and overhang must be non-negative");

  ElementLayout layout;
  layout.rows = rows;
  layout.cols = cols;
  layout.dx = dx;
  layout.dy = dy;
  layout.offsets.reserve(static_cast<std::size_t>(rows) * cols);
  const double x0 = 0.5 * (cols - 1) * dx;
  const double y0 = 0.5 * (rows - 1) * dy;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) layout.offsets.push_back({c * dx - x0, r * dy - y0});
  layout.footprint = {-x0 - margin, x0 + margin, -y0 - margin, y0 + margin + overhang};
  return layout;
}

DesignGrid make_design_grid(double width, double height, double pitch) {
  if (!(pitch > 0.0)) throw InvalidArgument("grid pitch must be positive");
  if (!(width > 0.0) || !(height > 0.0)) throw InvalidArgument("aperture must have positive area");
  DesignGrid g;
  g.extent = {-0.5 * width, 0.5 * width, -0.5 * height, 0.5 * height};
  g.pitch = pitch;
  const int nx = static_cast<int>(std::floor(width / pitch + 1e-9));
  const int ny = static_cast<int>(std::floor(height / pitch + 1e-9));
  if (nx < 1 || ny < 1) throw InvalidArgument("aperture smaller than one grid cell");
  const double xs = -0.5 * (nx - 1) * pitch;
  const double ys = -0.5 * (ny - 1) * pitch;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) g.points.push_back({xs + i * pitch, ys + j * pitch});
  std::ostringstream id;
  id << "grid-" << width << "x" << height << "-p" << pitch;
  g.id = id.str();
  return g;
}

bool satisfies_aos(const SuperArrayConfig& config, const ElementLayout& layout) {
  if (config.poses.size() != config.centers.size()) return false;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const Rect a = layout.footprint_at(config.centers[i], config.poses[i]);
    for (std::size_t j = i + 1; j < config.size(); ++j)
      if (a.overlaps(layout.footprint_at(config.centers[j], config.poses[j]))) return false;
  }
  return true;
}

std::vector<Vec2> expand_unchecked(std::span<const Vec2> centers, const ElementLayout& layout) {
  std::vector<Vec2> d;
  d.reserve(centers.size() * layout.size());
  Vec2 sum;
  for (const Vec2& c : centers)
    for (const Vec2& o : layout.offsets) {
      d.push_back(c + o);
      sum += c + o;
    }
  if (d.empty()) return d;
  const Vec2 mean = sum * (1.0 / static_cast<double>(d.size()));
  for (Vec2& p : d) p -= mean;
  return d;
}

std::vector<Vec2> expand_super_array(const SuperArrayConfig& config, const ElementLayout& layout) {
  if (config.centers.empty()) throw InvalidArgument("configuration has no subarrays");
  if (!satisfies_aos(config, layout)) throw ConstraintViolation("subarray footprints overlap");
  return expand_unchecked(config.centers, layout);
}

Cov2 covariance(std::span<const Vec2> pts) {
  Cov2 c;
  if (pts.empty()) return c;
  Vec2 mean;
  for (const Vec2& p : pts) mean += p;
  mean = mean * (1.0 / static_cast<double>(pts.size()));
  for (const Vec2& p : pts) {
    const Vec2 d = p - mean;
    c.sxx += d.x * d.x;
    c.sxy += d.x * d.y;
    c.syy += d.y * d.y;
  }
  const double inv = 1.0 / static_cast<double>(pts.size());
  c.sxx *= inv;
  c.sxy *= inv;
  c.syy *= inv;
  return c;
}

SymEig2 sym_eig2(double a, double b, double c) {
  SymEig2 e;
  const double mean = 0.5 * (a + c);
  const double half = 0.5 * (a - c);
  const double r = std::hypot(half, b);
  e.lambda1 = mean - r;
  e.lambda2 = mean + r;
  if (r == 0.0) {
    e.p1 = {1.0, 0.0};
    e.p2 = {0.0, 1.0};
    return e;
  }
  // Angle of the major eigenvector.
  const double theta = 0.5 * std::atan2(2.0 * b, a - c);
  e.p2 = {std::cos(theta), std::sin(theta)};
  e.p1 = {-e.p2.y, e.p2.x};
  return e;
}

ShapeSignature shape_signature(std::span<const Vec2> centers) {
  const std::size_t n = centers.size();
  if (n < 2) throw InvalidArgument("shape signature needs at least two subarrays");
  const Cov2 c = covariance(centers);
  const SymEig2 e = sym_eig2(c.sxx, c.sxy, c.syy);
  ShapeSignature s;
  s.lambda1 = std::max(0.0, e.lambda1);
  s.lambda2 = std::max(s.lambda1, e.lambda2);

  double sum = 0.0, sum2 = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double l = (centers[i] - centers[j]).norm();
      sum += l;
      sum2 += l * l;
      ++pairs;
    }
  const double m = sum / static_cast<double>(pairs);
  s.psi = std::max(0.0, sum2 / static_cast<double>(pairs) - m * m);
  return s;
}

double eigen_perturbation_bound(double radius, std::size_t n, double delta) {
  if (radius < 0.0 || delta < 0.0) throw InvalidArgument("radius and displacement must be non-negative");
  if (n < 1) throw InvalidArgument("point count must be positive");
  return (2.0 * radius + 1.0) * delta / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// PlacementState

namespace {

std::size_t words_for(std::size_t modules) {
  const std::size_t bits = std::size_t{1} << modules;
  return std::max<std::size_t>(1, bits / 64);
}

// Clears every assignment whose bit `i` differs from `pose`.
void keep_pose(std::uint64_t* bits, std::size_t words, std::size_t modules, std::size_t i, Pose pose) {
  const bool down = pose == Pose::Down;
  if (i < 6) {
    std::uint64_t pattern = 0;
    for (unsigned a = 0; a < 64; ++a)
      if ((((a >> i) & 1u) != 0) == down) pattern |= std::uint64_t{1} << a;
    if (modules < 6) pattern &= (std::uint64_t{1} << (std::size_t{1} << modules)) - 1;
    for (std::size_t w = 0; w < words; ++w) bits[w] &= pattern;
  } else {
    for (std::size_t w = 0; w < words; ++w)
      if ((((w >> (i - 6)) & 1u) != 0) != down) bits[w] = 0;
  }
}

void keep_pose(std::vector<std::uint64_t>& bits, std::size_t modules, std::size_t i, Pose pose) {
  keep_pose(bits.data(), bits.size(), modules, i, pose);
}

bool any_bit(const std::vector<std::uint64_t>& bits) {
  return std::any_of(bits.begin(), bits.end(), [](std::uint64_t w) { return w != 0; });
}

}  // namespace

PlacementState PlacementState::root(std::uint16_t point_index, Vec2 point, PoseSet poses) {
  PlacementState s;
  s.centers_ = {point};
  s.indices_ = {point_index};
  s.feasible_ = {static_cast<std::uint64_t>(poses) & 0x3u};
  return s;
}

PlacementState PlacementState::from_config(const SuperArrayConfig& config, const ElementLayout& layout) {
  if (config.centers.empty()) throw InvalidArgument("configuration has no subarrays");
  if (config.size() > kMaxModules) throw InvalidArgument("too many subarrays for pose tracking");
  if (config.poses.size() != config.size()) throw InvalidArgument("one pose per subarray required");
  auto single = [](Pose p) { return p == Pose::Up ? PoseSet::Up : PoseSet::Down; };
  PlacementState s = root(0, config.centers[0], single(config.poses[0]));
  for (std::size_t i = 1; i < config.size(); ++i) {
    if (!allows(s.probe(config.centers[i], layout), config.poses[i]))
      throw ConstraintViolation("subarray footprints overlap");
    s = s.place(0, config.centers[i], single(config.poses[i]), layout);
  }
  s.indices_.assign(config.size(), 0);
  return s;
}

PoseSet PlacementState::pose_state(std::size_t i) const {
  unsigned out = 0;
  for (Pose p : {Pose::Up, Pose::Down}) {
    Bits b = feasible_;
    keep_pose(b, size(), i, p);
    if (any_bit(b)) out |= 1u << static_cast<unsigned>(p);
  }
  return static_cast<PoseSet>(out);
}

void PlacementState::restrict_for(Vec2 p, Pose q, const ElementLayout& layout, Bits& out, bool& any) const {
  const Rect mine = layout.footprint_at(p, q);
  out = feasible_;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    const bool up_ok = !mine.overlaps(layout.footprint_at(centers_[i], Pose::Up));
    const bool down_ok = !mine.overlaps(layout.footprint_at(centers_[i], Pose::Down));
    if (!up_ok && !down_ok) {
      any = false;
      return;
    }
    if (up_ok && down_ok) continue;
    keep_pose(out, size(), i, up_ok ? Pose::Up : Pose::Down);
  }
  any = any_bit(out);
}

PoseSet PlacementState::probe(Vec2 p, const ElementLayout& layout) const {
  // Per module: which of its poses clear the newcomer in pose q.
  std::uint8_t clear[2][kMaxModules];
  bool constrained[2] = {false, false};
  for (Pose q : {Pose::Up, Pose::Down}) {
    const unsigned qi = static_cast<unsigned>(q);
    const Rect mine = layout.footprint_at(p, q);
    for (std::size_t i = 0; i < centers_.size(); ++i) {
      const bool up_ok = !mine.overlaps(layout.footprint_at(centers_[i], Pose::Up));
      const bool down_ok = !mine.overlaps(layout.footprint_at(centers_[i], Pose::Down));
      clear[qi][i] = static_cast<std::uint8_t>(up_ok | (down_ok << 1));
      if (!(up_ok && down_ok)) constrained[qi] = true;
    }
  }
  unsigned out = 0;
  std::uint64_t buf[(std::size_t{1} << kMaxModules) / 64];
  for (Pose q : {Pose::Up, Pose::Down}) {
    const unsigned qi = static_cast<unsigned>(q);
    bool any = true;
    if (constrained[qi]) {
      std::copy(feasible_.begin(), feasible_.end(), buf);
      for (std::size_t i = 0; i < centers_.size() && any; ++i) {
        if (clear[qi][i] == 3) continue;
        if (clear[qi][i] == 0) any = false;
        else keep_pose(buf, feasible_.size(), size(), i, clear[qi][i] == 1 ? Pose::Up : Pose::Down);
      }
      any = any && std::any_of(buf, buf + feasible_.size(), [](std::uint64_t w) { return w != 0; });
    } else {
      any = any_bit(feasible_);
    }
    if (any) out |= 1u << qi;
  }
  return static_cast<PoseSet>(out);
}

std::vector<Vacancy> PlacementState::vacancies(const DesignGrid& grid, const ElementLayout& layout) const {
  std::vector<Vacancy> out;
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const PoseSet s = probe(grid.points[k], layout);
    if (s != PoseSet::None) out.push_back({k, grid.points[k], s});
  }
  return out;
}

PlacementState PlacementState::place(std::uint16_t point_index, Vec2 p, PoseSet allowed,
                                     const ElementLayout& layout) const {
  const std::size_t n = size();
  if (n + 1 > kMaxModules) throw InvalidArgument("too many subarrays for pose tracking");
  Bits up, down;
  bool up_any = false, down_any = false;
  if (allows(allowed, Pose::Up)) restrict_for(p, Pose::Up, layout, up, up_any);
  if (allows(allowed, Pose::Down)) restrict_for(p, Pose::Down, layout, down, down_any);
  if (!up_any && !down_any) throw ConstraintViolation("no feasible pose at placement point");
  if (!up_any) up.assign(feasible_.size(), 0);
  if (!down_any) down.assign(feasible_.size(), 0);

  PlacementState s;
  s.centers_ = centers_;
  s.centers_.push_back(p);
  s.indices_ = indices_;
  s.indices_.push_back(point_index);
  if (n < 6) {
    const unsigned half = 1u << n;
    s.feasible_ = {up[0] | (down[0] << half)};
  } else {
    s.feasible_.reserve(words_for(n + 1));
    s.feasible_.insert(s.feasible_.end(), up.begin(), up.end());
    s.feasible_.insert(s.feasible_.end(), down.begin(), down.end());
  }
  return s;
}

std::vector<Pose> PlacementState::resolve_poses() const {
  for (std::size_t w = 0; w < feasible_.size(); ++w) {
    if (feasible_[w] == 0) continue;
    const std::size_t a = w * 64 + static_cast<std::size_t>(std::countr_zero(feasible_[w]));
    std::vector<Pose> poses(size());
    for (std::size_t i = 0; i < size(); ++i) poses[i] = ((a >> i) & 1u) ? Pose::Down : Pose::Up;
    return poses;
  }
  throw ConstraintViolation("no feasible pose assignment");
}

SuperArrayConfig PlacementState::to_config(const std::string& grid_id) const {
  SuperArrayConfig c;
  c.centers = centers_;
  c.poses = resolve_poses();
  c.grid_id = grid_id;
  return c;
}

std::vector<Vacancy> vacancy_search(const SuperArrayConfig& occupied, const DesignGrid& grid,
                                    const ElementLayout& layout) {
  if (occupied.centers.empty()) {
    std::vector<Vacancy> all;
    for (std::size_t k = 0; k < grid.points.size(); ++k) all.push_back({k, grid.points[k], PoseSet::Free});
    return all;
  }
  return PlacementState::from_config(occupied, layout).vacancies(grid, layout);
}

}  // namespace subarray
