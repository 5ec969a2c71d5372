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

#include "esdf/bvh.hpp"

#include <algorithm>
#include <cmath>

namespace esdf {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  Vec3 bp = p - b;
  double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

  Vec3 cp = p - c;
  double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + (c - b) * w;
  }

  double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

namespace {

constexpr std::uint32_t kLeafSize = 4;

// Moller-Trumbore. Returns t > 0 hit; marks grazing hits (barycentric
// coordinate at the boundary or near-parallel ray) as degenerate.
bool ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                  const Vec3& c, double& t_out, bool& degenerate) {
  constexpr double kParallelEps = 1e-13;
  constexpr double kEdgeEps = 1e-10;

  Vec3 e1 = b - a, e2 = c - a;
  Vec3 pvec = cross(dir, e2);
  double det = dot(e1, pvec);
  if (std::fabs(det) < kParallelEps) {
    // coplanar or parallel; only a problem if the ray passes near the triangle
    Vec3 q = closest_point_on_triangle(origin, a, b, c) - origin;
    double along = dot(q, dir);
    if (along > 0.0 && norm2(q - dir * along) < kEdgeEps) degenerate = true;
    return false;
  }
  double inv_det = 1.0 / det;
  Vec3 tvec = origin - a;
  double u = dot(tvec, pvec) * inv_det;
  if (u < -kEdgeEps || u > 1.0 + kEdgeEps) return false;
  Vec3 qvec = cross(tvec, e1);
  double v = dot(dir, qvec) * inv_det;
  if (v < -kEdgeEps || u + v > 1.0 + kEdgeEps) return false;
  double t = dot(e2, qvec) * inv_det;
  if (t <= 0.0) {
    if (std::fabs(t) < kEdgeEps) degenerate = true;
    return false;
  }
  if (u < kEdgeEps || v < kEdgeEps || u + v > 1.0 - kEdgeEps || t < kEdgeEps)
    degenerate = true;
  t_out = t;
  return true;
}

bool ray_box(const Vec3& origin, const Vec3& inv_dir, const Box3& box) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    double lo = (box.min[a] - origin[a]) * inv_dir[a];
    double hi = (box.max[a] - origin[a]) * inv_dir[a];
    if (inv_dir[a] < 0.0) std::swap(lo, hi);
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh) {
  std::size_t n = mesh.faces.size();
  if (n == 0) return;

  std::vector<Vec3> centroids(n);
  std::vector<std::uint32_t> order(n);
  for (std::size_t f = 0; f < n; ++f) {
    order[f] = static_cast<std::uint32_t>(f);
    centroids[f] = (mesh.face_vertex(f, 0) + mesh.face_vertex(f, 1) +
                    mesh.face_vertex(f, 2)) / 3.0;
  }

  tri_a_.resize(n);
  tri_b_.resize(n);
  tri_c_.resize(n);
  tri_id_.resize(n);
  nodes_.reserve(2 * n);

  // Two passes: first lay out the tree over the index permutation, then
  // flatten triangles into leaf order for cache-friendly queries.
  struct Range {
    std::uint32_t node, begin, end;
  };
  nodes_.push_back({});
  std::vector<Range> stack{{0, 0, static_cast<std::uint32_t>(n)}};
  std::uint32_t out = 0;
  while (!stack.empty()) {
    Range r = stack.back();
    stack.pop_back();

    Box3 box;
    for (std::uint32_t i = r.begin; i < r.end; ++i) {
      std::uint32_t f = order[i];
      box.expand(mesh.face_vertex(f, 0));
      box.expand(mesh.face_vertex(f, 1));
      box.expand(mesh.face_vertex(f, 2));
    }
    nodes_[r.node].box = box;

    std::uint32_t count = r.end - r.begin;
    if (count <= kLeafSize) {
      nodes_[r.node].first = out;
      nodes_[r.node].count = count;
      for (std::uint32_t i = r.begin; i < r.end; ++i) {
        std::uint32_t f = order[i];
        tri_a_[out] = mesh.face_vertex(f, 0);
        tri_b_[out] = mesh.face_vertex(f, 1);
        tri_c_[out] = mesh.face_vertex(f, 2);
        tri_id_[out] = f;
        ++out;
      }
      continue;
    }

    Vec3 ext = box.extent();
    int axis = 0;
    if (ext.y > ext.x) axis = 1;
    if (ext.z > ext[axis]) axis = 2;
    std::uint32_t mid = r.begin + count / 2;
    std::nth_element(order.begin() + r.begin, order.begin() + mid, order.begin() + r.end,
                     [&](std::uint32_t lhs, std::uint32_t rhs) {
                       double cl = centroids[lhs][axis], cr = centroids[rhs][axis];
                       return cl < cr || (cl == cr && lhs < rhs);
                     });

    std::uint32_t left = static_cast<std::uint32_t>(nodes_.size());
    nodes_[r.node].first = left;
    nodes_[r.node].count = 0;
    nodes_.push_back({});
    nodes_.push_back({});
    stack.push_back({left + 1, mid, r.end});
    stack.push_back({left, r.begin, mid});
  }
}

Bvh::ClosestHit Bvh::closest(const Vec3& query) const {
  ClosestHit best;
  if (nodes_.empty()) return best;
  double best_d2 = std::numeric_limits<double>::infinity();

  struct Entry {
    std::uint32_t node;
    double d2;
  };
  Entry stack[128];
  int top = 0;
  stack[top++] = {0, nodes_[0].box.dist2(query)};

  while (top > 0) {
    Entry e = stack[--top];
    if (e.d2 >= best_d2) continue;
    const Node& node = nodes_[e.node];
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        Vec3 cp = closest_point_on_triangle(query, tri_a_[i], tri_b_[i], tri_c_[i]);
        double d2 = norm2(cp - query);
        if (d2 < best_d2) {
          best_d2 = d2;
          best.triangle = tri_id_[i];
          best.point = cp;
        }
      }
      continue;
    }
    double dl = nodes_[node.first].box.dist2(query);
    double dr = nodes_[node.first + 1].box.dist2(query);
    // push the farther child first so the nearer one is explored next
    if (dl < dr) {
      if (dr < best_d2) stack[top++] = {node.first + 1, dr};
      if (dl < best_d2) stack[top++] = {node.first, dl};
    } else {
      if (dl < best_d2) stack[top++] = {node.first, dl};
      if (dr < best_d2) stack[top++] = {node.first + 1, dr};
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

Bvh::CrossingCount Bvh::count_crossings(const Vec3& origin, const Vec3& dir) const {
  CrossingCount result;
  if (nodes_.empty()) return result;
  Vec3 inv_dir{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};

  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!ray_box(origin, inv_dir, node.box)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        double t;
        if (ray_triangle(origin, dir, tri_a_[i], tri_b_[i], tri_c_[i], t,
                         result.degenerate))
          ++result.count;
      }
      continue;
    }
    stack[top++] = node.first;
    stack[top++] = node.first + 1;
  }
  return result;
}

RayHit Bvh::first_hit(const Vec3& origin, const Vec3& dir) const {
  RayHit best;
  if (nodes_.empty()) return best;
  Vec3 inv_dir{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};

  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!ray_box(origin, inv_dir, node.box)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        double t;
        bool degenerate = false;
        if (ray_triangle(origin, dir, tri_a_[i], tri_b_[i], tri_c_[i], t, degenerate) &&
            t < best.t) {
          best.t = t;
          best.triangle = tri_id_[i];
          best.degenerate = degenerate;
        }
      }
      continue;
    }
    stack[top++] = node.first;
    stack[top++] = node.first + 1;
  }
  return best;
}

}  // namespace esdf
