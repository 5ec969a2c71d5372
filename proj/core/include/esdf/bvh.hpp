// Copyright 2026 The esdf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "esdf/mesh.hpp"
#include "esdf/vec3.hpp"

namespace esdf {

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  std::uint32_t triangle = 0;
  bool degenerate = false;  // grazing hit: on an edge/vertex or near-parallel
};

// Axis-aligned bounding-box tree over mesh triangles. Immutable after
// construction; queries are const and safe to run concurrently.
class Bvh {
 public:
  explicit Bvh(const TriangleMesh& mesh);

  struct ClosestHit {
    double distance = std::numeric_limits<double>::infinity();
    std::uint32_t triangle = 0;
    Vec3 point;
  };

  ClosestHit closest(const Vec3& query) const;
  double distance(const Vec3& query) const { return closest(query).distance; }

  // Counts crossings of the ray origin + t*dir, t > 0. Sets degenerate when
  // any intersection is a grazing hit, in which case the parity is suspect.
  struct CrossingCount {
    int count = 0;
    bool degenerate = false;
  };
  CrossingCount count_crossings(const Vec3& origin, const Vec3& dir) const;

  // Nearest intersection along the ray, infinity t when there is none.
  RayHit first_hit(const Vec3& origin, const Vec3& dir) const;

  const Box3& bounds() const { return nodes_.empty() ? empty_bounds_ : nodes_[0].box; }
  std::size_t triangle_count() const { return tri_a_.size(); }

 private:
  struct Node {
    Box3 box;
    std::uint32_t first = 0;  // child index when internal, triangle offset when leaf
    std::uint32_t count = 0;  // triangle count when leaf, 0 when internal
  };

  std::uint32_t build(std::vector<std::uint32_t>& order, std::uint32_t begin,
                      std::uint32_t end, const std::vector<Vec3>& centroids);

  std::vector<Node> nodes_;
  // triangles flattened in BVH leaf order
  std::vector<Vec3> tri_a_, tri_b_, tri_c_;
  std::vector<std::uint32_t> tri_id_;
  Box3 empty_bounds_;
};

}  // namespace esdf
