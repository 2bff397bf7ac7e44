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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subarray/types.hpp"

namespace subarray {

/// Axis-aligned closed rectangle.
struct Rect {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  Rect translated(Vec2 c) const { return {xmin + c.x, xmax + c.x, ymin + c.y, ymax + c.y}; }
  /// 180 degree rotation about the local origin.
  Rect rotated180() const { return {-xmax, -xmin, -ymax, -ymin}; }
  bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  /// Interiors intersect. Touching edges do not count.
  bool overlaps(const Rect& o) const {
    return xmin < o.xmax && o.xmin < xmax && ymin < o.ymax && o.ymin < ymax;
  }
};

/// Fixed element tile of one subarray module.
struct ElementLayout {
  int rows = 0;
  int cols = 0;
  double dx = 0.0;
  double dy = 0.0;
  std::vector<Vec2> offsets;  // relative to the element-pattern center, row-major
  Rect footprint;             // module outline in the Up pose, relative to the center

  std::size_t size() const { return offsets.size(); }
  Rect footprint_at(Vec2 center, Pose pose) const {
    return (pose == Pose::Up ? footprint : footprint.rotated180()).translated(center);
  }
};

/// Centered rows x cols lattice. The footprint is the element bounding box
/// grown by `margin` on every side and by `overhang` on the +y side.
ElementLayout build_subarray_layout(int rows, int cols, double dx, double dy, double margin = 0.0,
                                    double overhang = 0.5);

struct SuperArrayConfig {
  std::vector<Vec2> centers;
  std::vector<Pose> poses;
  std::optional<std::string> grid_id;

  std::size_t size() const { return centers.size(); }
};

struct DesignGrid {
  Rect extent;
  double pitch = 1.0;
  std::vector<Vec2> points;
  std::string id;
};

/// Lattice of floor(width/pitch) x floor(height/pitch) cell centers filling a
/// width x height aperture centered at the origin.
DesignGrid make_design_grid(double width, double height, double pitch);

/// Pairwise footprint check, independent of any search bookkeeping.
bool satisfies_aos(const SuperArrayConfig& config, const ElementLayout& layout);

/// All element positions, re-centered so they sum to zero. Subarray-major order.
std::vector<Vec2> expand_super_array(const SuperArrayConfig& config, const ElementLayout& layout);

/// Same as expand_super_array without the overlap check (benchmarks, perturbation studies).
std::vector<Vec2> expand_unchecked(std::span<const Vec2> centers, const ElementLayout& layout);

struct ShapeSignature {
  double lambda1 = 0.0;  // smaller eigenvalue of the center covariance
  double lambda2 = 0.0;
  double psi = 0.0;  // variance of pairwise center distances
};

ShapeSignature shape_signature(std::span<const Vec2> centers);
inline ShapeSignature shape_signature(const SuperArrayConfig& c) { return shape_signature(c.centers); }

/// Symmetric 2x2 eigen-decomposition, ascending eigenvalues.
struct SymEig2 {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Vec2 p1;  // eigenvector of lambda1
  Vec2 p2;
};
SymEig2 sym_eig2(double a, double b, double c);  // [[a, b], [b, c]]

/// Population covariance entries (sxx, sxy, syy) of a point set.
struct Cov2 {
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
};
Cov2 covariance(std::span<const Vec2> pts);

struct Vacancy {
  std::size_t point_index = 0;
  Vec2 point;
  PoseSet poses = PoseSet::None;
};

/// Grid points where one more module fits, with the poses it may take.
std::vector<Vacancy> vacancy_search(const SuperArrayConfig& occupied, const DesignGrid& grid,
                                    const ElementLayout& layout);

/// Weyl-type bound on the change of a covariance eigenvalue when one of N
/// points at distance `radius` from the centroid moves by `delta` (delta <= 1).
double eigen_perturbation_bound(double radius, std::size_t n, double delta);

/// Search state of a partially placed super-array. Tracks the exact set of
/// pose assignments that keep every pair of placed modules disjoint, so the
/// per-module pose state (up / down / free) is updated as modules are added.
class PlacementState {
 public:
  static constexpr std::size_t kMaxModules = 12;

  PlacementState() = default;

  /// Single module; `poses` restricts its initial state.
  static PlacementState root(std::uint16_t point_index, Vec2 point, PoseSet poses = PoseSet::Free);

  /// Fixed poses taken from an existing configuration.
  static PlacementState from_config(const SuperArrayConfig& config, const ElementLayout& layout);

  std::size_t size() const { return centers_.size(); }
  const std::vector<Vec2>& centers() const { return centers_; }
  const std::vector<std::uint16_t>& point_indices() const { return indices_; }

  /// Poses module i can still take in some feasible assignment.
  PoseSet pose_state(std::size_t i) const;

  /// Poses a new module at `p` may take.
  PoseSet probe(Vec2 p, const ElementLayout& layout) const;

  std::vector<Vacancy> vacancies(const DesignGrid& grid, const ElementLayout& layout) const;

  /// New state with a module added at p; `allowed` must intersect probe(p).
  PlacementState place(std::uint16_t point_index, Vec2 p, PoseSet allowed, const ElementLayout& layout) const;

  /// Lowest-index feasible assignment.
  std::vector<Pose> resolve_poses() const;

  SuperArrayConfig to_config(const std::string& grid_id) const;

 private:
  // Bit a of the set is assignment a: bit i of a is the pose of module i.
  using Bits = std::vector<std::uint64_t>;
  void restrict_for(Vec2 p, Pose q, const ElementLayout& layout, Bits& out, bool& any) const;

  std::vector<Vec2> centers_;
  std::vector<std::uint16_t> indices_;
  Bits feasible_;
};

}  // namespace subarray
