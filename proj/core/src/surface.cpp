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

#include "esdf/surface.hpp"

#include <array>
#include <cmath>

#include "esdf/errors.hpp"
#include "mc_tables.hpp"

namespace esdf {

namespace {

// Bourke cube corner offsets: bottom ring 0-3 (z), top ring 4-7 (z+1).
constexpr int kCorner[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

constexpr int kEdgeEnds[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0},
    {4, 5}, {5, 6}, {6, 7}, {7, 4},
    {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

// Each cube edge as (lattice point of its lower end, axis), for global dedup.
struct EdgeKey {
  int dx, dy, dz, axis;
};
constexpr EdgeKey kEdgeKey[12] = {
    {0, 0, 0, 0}, {1, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 0, 1},
    {0, 0, 1, 0}, {1, 0, 1, 1}, {0, 1, 1, 0}, {0, 0, 1, 1},
    {0, 0, 0, 2}, {1, 0, 0, 2}, {1, 1, 0, 2}, {0, 1, 0, 2},
};

}  // namespace

IsoSurface marching_cubes(const SdfGrid& grid, double iso) {
  IsoSurface out;
  const int m = grid.resolution;
  if (m < 2) {
    out.empty = true;
    return out;
  }
  const double nudge = 1e-6 * grid.spacing;
  auto value = [&](int x, int y, int z) {
    double v = grid.at(x, y, z);
    return v == iso ? iso + nudge : v;
  };

  // vertex index per (lattice point, axis), assigned on first use
  std::vector<std::int32_t> edge_vertex(grid.voxel_count() * 3, -1);
  auto edge_slot = [&](int x, int y, int z, int axis) -> std::int32_t& {
    return edge_vertex[grid.index(x, y, z) * 3 + axis];
  };

  TriangleMesh& mesh = out.mesh;
  for (int z = 0; z < m - 1; ++z) {
    for (int y = 0; y < m - 1; ++y) {
      for (int x = 0; x < m - 1; ++x) {
        double corner_val[8];
        int case_index = 0;
        for (int c = 0; c < 8; ++c) {
          corner_val[c] = value(x + kCorner[c][0], y + kCorner[c][1], z + kCorner[c][2]);
          if (corner_val[c] < iso) case_index |= 1 << c;  // bit set = outside
        }
        int edges = detail::kMcEdgeTable[case_index];
        if (edges == 0) continue;

        std::int32_t cut[12];
        for (int e = 0; e < 12; ++e) {
          if (!(edges & (1 << e))) continue;
          const EdgeKey& key = kEdgeKey[e];
          std::int32_t& slot = edge_slot(x + key.dx, y + key.dy, z + key.dz, key.axis);
          if (slot < 0) {
            int c0 = kEdgeEnds[e][0], c1 = kEdgeEnds[e][1];
            double v0 = corner_val[c0], v1 = corner_val[c1];
            double t = (iso - v0) / (v1 - v0);
            t = std::clamp(t, 0.0, 1.0);
            Vec3 p0 = grid.voxel_center(x + kCorner[c0][0], y + kCorner[c0][1],
                                        z + kCorner[c0][2]);
            Vec3 p1 = grid.voxel_center(x + kCorner[c1][0], y + kCorner[c1][1],
                                        z + kCorner[c1][2]);
            slot = static_cast<std::int32_t>(mesh.vertices.size());
            mesh.vertices.push_back(p0 + (p1 - p0) * t);
          }
          cut[e] = slot;
        }

        const int* tri = detail::kMcTriTable[case_index];
        for (int e = 0; tri[e] != -1; e += 3) {
          // table winding is inward for the interior-positive convention;
          // swap to make normals point outward
          mesh.faces.push_back({static_cast<std::uint32_t>(cut[tri[e]]),
                                static_cast<std::uint32_t>(cut[tri[e + 2]]),
                                static_cast<std::uint32_t>(cut[tri[e + 1]])});
        }
      }
    }
  }

  out.empty = mesh.faces.empty();
  out.vertex_normals.resize(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    Vec3 g = grid.gradient_at(mesh.vertices[i]);
    double n = norm(g);
    // outward = toward decreasing phi
    out.vertex_normals[i] = n > 1e-12 ? g / -n : Vec3{0, 0, 1};
  }
  return out;
}

std::vector<SurfaceSample> surface_points(const IsoSurface& iso, std::size_t n,
                                          std::uint64_t seed) {
  if (n == 0) return {};
  return sample_surface(iso.mesh, n, seed);
}

}  // namespace esdf
