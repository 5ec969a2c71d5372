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

#include "esdf/mesh.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <utility>

#include "esdf/errors.hpp"
#include "esdf/rng.hpp"

namespace esdf {

const char* family_name(ShapeFamily f) {
  switch (f) {
    case ShapeFamily::ellipsoid: return "ellipsoid";
    case ShapeFamily::box: return "box";
    case ShapeFamily::capsule: return "capsule";
    case ShapeFamily::table_like: return "table-like";
    case ShapeFamily::chair_like: return "chair-like";
    case ShapeFamily::blend: return "blend";
  }
  return "?";
}

ShapeFamily family_from_name(const std::string& name) {
  if (name == "ellipsoid") return ShapeFamily::ellipsoid;
  if (name == "box") return ShapeFamily::box;
  if (name == "capsule") return ShapeFamily::capsule;
  if (name == "table-like" || name == "table") return ShapeFamily::table_like;
  if (name == "chair-like" || name == "chair") return ShapeFamily::chair_like;
  if (name == "blend") return ShapeFamily::blend;
  throw config_error("unknown shape family: " + name);
}

namespace {
constexpr double kDegenerateArea = 1e-12;
}  // namespace

WatertightReport check_watertight(const TriangleMesh& mesh) {
  WatertightReport report;
  if (mesh.faces.empty()) return report;

  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (mesh.face_area(f) <= kDegenerateArea) {
      report.has_degenerate_faces = true;
      break;
    }
  }

  // Per undirected edge: total count and directed balance. Watertight needs
  // count == 2 everywhere; consistent orientation needs balance == 0.
  struct EdgeUse {
    int count = 0;
    int balance = 0;
  };
  std::map<std::pair<std::uint32_t, std::uint32_t>, EdgeUse> edges;
  for (const auto& face : mesh.faces) {
    for (int c = 0; c < 3; ++c) {
      std::uint32_t a = face[c];
      std::uint32_t b = face[(c + 1) % 3];
      if (a == b) {
        report.has_degenerate_faces = true;
        continue;
      }
      auto key = std::minmax(a, b);
      auto& use = edges[{key.first, key.second}];
      use.count += 1;
      use.balance += (a < b) ? 1 : -1;
    }
  }

  report.watertight = true;
  report.oriented = true;
  for (const auto& [key, use] : edges) {
    if (use.count != 2) {
      report.watertight = false;
      report.bad_edges.push_back({key.first, key.second});
    } else if (use.balance != 0) {
      report.oriented = false;
      report.bad_edges.push_back({key.first, key.second});
    }
  }
  return report;
}

bool is_watertight(const TriangleMesh& mesh) { return check_watertight(mesh).ok(); }

double signed_volume(const TriangleMesh& mesh) {
  double vol = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    Vec3 a = mesh.face_vertex(f, 0);
    Vec3 b = mesh.face_vertex(f, 1);
    Vec3 c = mesh.face_vertex(f, 2);
    vol += dot(a, cross(b, c));
  }
  return vol / 6.0;
}

Box3 bounding_box(const TriangleMesh& mesh) {
  Box3 box;
  for (const Vec3& v : mesh.vertices) box.expand(v);
  return box;
}

void normalize_to_box(TriangleMesh& mesh, double half_extent) {
  if (mesh.vertices.empty()) return;
  Box3 box = bounding_box(mesh);
  Vec3 center = box.center();
  double max_half = 0.5 * max_component(box.extent());
  double scale = max_half > 0.0 ? half_extent / max_half : 1.0;
  for (Vec3& v : mesh.vertices) v = (v - center) * scale;
}

std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, std::size_t n,
                                          std::uint64_t seed) {
  if (mesh.faces.empty()) throw data_error("sample_surface: empty mesh");
  std::vector<SurfaceSample> samples;
  if (n == 0) return samples;
  samples.reserve(n);

  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += mesh.face_area(f);
    cumulative[f] = total;
  }
  if (total <= 0.0) throw data_error("sample_surface: zero total area");

  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t f = std::min<std::size_t>(it - cumulative.begin(), mesh.faces.size() - 1);

    // sqrt warp for uniform barycentric coordinates
    double r1 = std::sqrt(rng.uniform());
    double r2 = rng.uniform();
    double w0 = 1.0 - r1;
    double w1 = r1 * (1.0 - r2);
    double w2 = r1 * r2;

    Vec3 p = mesh.face_vertex(f, 0) * w0 + mesh.face_vertex(f, 1) * w1 +
             mesh.face_vertex(f, 2) * w2;
    samples.push_back({p, mesh.face_normal(f)});
  }
  return samples;
}

}  // namespace esdf
