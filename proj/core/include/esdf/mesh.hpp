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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "esdf/vec3.hpp"

namespace esdf {

// Closed triangle surface. Faces are counterclockwise when seen from
// outside, so face normals point away from the enclosed volume.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;

  bool empty() const { return faces.empty(); }

  Vec3 face_vertex(std::size_t f, int corner) const { return vertices[faces[f][corner]]; }

  Vec3 face_normal(std::size_t f) const {
    return normalized(cross(face_vertex(f, 1) - face_vertex(f, 0),
                            face_vertex(f, 2) - face_vertex(f, 0)));
  }

  double face_area(std::size_t f) const {
    return 0.5 * norm(cross(face_vertex(f, 1) - face_vertex(f, 0),
                            face_vertex(f, 2) - face_vertex(f, 0)));
  }
};

// Point on the surface with the outward unit normal of its face.
struct SurfaceSample {
  Vec3 point;
  Vec3 normal;
};

enum class ShapeFamily { ellipsoid, box, capsule, table_like, chair_like, blend };

const char* family_name(ShapeFamily f);
ShapeFamily family_from_name(const std::string& name);

// Deterministic recipe for one procedural shape: same spec, same mesh.
struct ShapeSpec {
  ShapeFamily family = ShapeFamily::ellipsoid;
  std::vector<double> params;
  std::uint64_t seed = 0;
};

struct WatertightReport {
  bool watertight = false;
  bool oriented = false;                 // each shared edge used once per direction
  bool has_degenerate_faces = false;
  // Undirected edges not shared by exactly two faces.
  std::vector<std::array<std::uint32_t, 2>> bad_edges;

  bool ok() const { return watertight && oriented && !has_degenerate_faces; }
};

WatertightReport check_watertight(const TriangleMesh& mesh);

// Discards the report; true iff closed, consistently oriented, no degenerate faces.
bool is_watertight(const TriangleMesh& mesh);

// Divergence-theorem volume; positive for outward-oriented closed meshes.
double signed_volume(const TriangleMesh& mesh);

Box3 bounding_box(const TriangleMesh& mesh);

// Uniformly scales and recenters so the mesh fits the given half-extent cube,
// preserving aspect ratio. Loaded meshes go through this; generated shapes
// are already sized into [-0.45, 0.45]^3 by their parameter ranges.
void normalize_to_box(TriangleMesh& mesh, double half_extent = 0.45);

// Area-weighted uniform surface samples with face normals, seed-deterministic.
// n = 0 yields an empty list. Throws data_error on an empty mesh.
std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, std::size_t n,
                                          std::uint64_t seed);

}  // namespace esdf
