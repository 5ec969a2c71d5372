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
#include <vector>

#include "esdf/vec3.hpp"

namespace esdf {

// Exact nearest-neighbor search over a fixed point set.
class KdTree3 {
 public:
  explicit KdTree3(std::vector<Vec3> points);

  struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;
  };

  Neighbor nearest(const Vec3& query) const;
  bool any_within(const Vec3& query, double radius) const;

  std::size_t size() const { return points_.size(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

 private:
  struct Node {
    double split = 0.0;
    std::int32_t axis = -1;  // -1 marks a leaf
    std::uint32_t left = 0, right = 0;   // children when internal
    std::uint32_t first = 0, count = 0;  // point range when leaf
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::uint32_t node, const Vec3& query, Neighbor& best) const;

  std::vector<Vec3> points_;         // reordered
  std::vector<std::size_t> ids_;     // original index per reordered point
  std::vector<Node> nodes_;
};

}  // namespace esdf
