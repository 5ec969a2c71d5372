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

#include "esdf/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "esdf/errors.hpp"

namespace esdf {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

KdTree3::KdTree3(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw data_error("KdTree3: empty point set");
  ids_.resize(points_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) ids_[i] = i;
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  build(0, static_cast<std::uint32_t>(points_.size()));
}

std::uint32_t KdTree3::build(std::uint32_t begin, std::uint32_t end) {
  std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({});
  if (end - begin <= kLeafSize) {
    nodes_[id].first = begin;
    nodes_[id].count = end - begin;
    return id;
  }

  Box3 box;
  for (std::uint32_t i = begin; i < end; ++i) box.expand(points_[i]);
  Vec3 ext = box.extent();
  int axis = 0;
  if (ext.y > ext.x) axis = 1;
  if (ext.z > ext[axis]) axis = 2;

  std::uint32_t mid = begin + (end - begin) / 2;
  auto b = points_.begin();
  // sort both arrays in lockstep via an index permutation
  std::vector<std::uint32_t> perm(end - begin);
  for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = begin + i;
  std::nth_element(perm.begin(), perm.begin() + (mid - begin), perm.end(),
                   [&](std::uint32_t l, std::uint32_t r) {
                     double a = (b + l)->operator[](axis), c = (b + r)->operator[](axis);
                     return a < c || (a == c && ids_[l] < ids_[r]);
                   });
  std::vector<Vec3> tmp_pts(perm.size());
  std::vector<std::size_t> tmp_ids(perm.size());
  for (std::uint32_t i = 0; i < perm.size(); ++i) {
    tmp_pts[i] = points_[perm[i]];
    tmp_ids[i] = ids_[perm[i]];
  }
  std::copy(tmp_pts.begin(), tmp_pts.end(), points_.begin() + begin);
  std::copy(tmp_ids.begin(), tmp_ids.end(), ids_.begin() + begin);

  nodes_[id].axis = axis;
  nodes_[id].split = points_[mid][axis];
  std::uint32_t left = build(begin, mid);
  std::uint32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree3::search(std::uint32_t node_id, const Vec3& query, Neighbor& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
      double d = norm(points_[i] - query);
      if (d < best.distance) {
        best.distance = d;
        best.index = ids_[i];
      }
    }
    return;
  }
  double delta = query[node.axis] - node.split;
  std::uint32_t near = delta < 0.0 ? node.left : node.right;
  std::uint32_t far = delta < 0.0 ? node.right : node.left;
  search(near, query, best);
  if (std::fabs(delta) < best.distance) search(far, query, best);
}

KdTree3::Neighbor KdTree3::nearest(const Vec3& query) const {
  Neighbor best;
  best.distance = std::numeric_limits<double>::infinity();
  search(0, query, best);
  return best;
}

bool KdTree3::any_within(const Vec3& query, double radius) const {
  return nearest(query).distance <= radius;
}

}  // namespace esdf
