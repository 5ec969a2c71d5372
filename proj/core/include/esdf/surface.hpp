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

#include <vector>

#include "esdf/mesh.hpp"
#include "esdf/sdf_grid.hpp"

namespace esdf {

// Zero level set of an SDF grid as a triangle mesh. Vertex normals come from
// the trilinear gradient of the grid and point outward (toward decreasing phi).
struct IsoSurface {
  TriangleMesh mesh;
  std::vector<Vec3> vertex_normals;
  bool empty = false;  // grid had one sign only; mesh has no triangles
};

// Standard 256-case marching cubes with linear edge interpolation and
// per-edge vertex dedup. Grid corner values exactly at iso are nudged by
// 1e-6 * spacing to avoid degenerate triangles.
IsoSurface marching_cubes(const SdfGrid& grid, double iso = 0.0);

// Area-weighted samples of the extracted surface; empty surface yields an
// empty list for n = 0 and throws data_error otherwise.
std::vector<SurfaceSample> surface_points(const IsoSurface& iso, std::size_t n,
                                          std::uint64_t seed);

}  // namespace esdf
