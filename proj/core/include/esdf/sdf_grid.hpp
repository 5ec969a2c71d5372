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
#include <string>
#include <vector>

#include "esdf/implicit.hpp"
#include "esdf/mesh.hpp"
#include "esdf/vec3.hpp"

namespace esdf {

class Bvh;

// Signed distance samples on an M^3 grid of voxel centers, x-fastest layout.
// Sign convention: positive strictly inside the surface, negative outside.
// Values are f64 in memory and f32 in the on-disk `ESDF` format.
struct SdfGrid {
  int resolution = 0;   // M, voxels per axis
  Vec3 origin;          // world position of voxel (0,0,0) center
  double spacing = 0.0; // world units between voxel centers
  std::vector<double> values;

  static SdfGrid make(int resolution, const Box3& extent = Box3::unit_domain());

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(resolution) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(resolution) * static_cast<std::size_t>(z));
  }
  double at(int x, int y, int z) const { return values[index(x, y, z)]; }
  double& at(int x, int y, int z) { return values[index(x, y, z)]; }

  Vec3 voxel_center(int x, int y, int z) const {
    return origin + Vec3{static_cast<double>(x), static_cast<double>(y),
                         static_cast<double>(z)} * spacing;
  }

  std::size_t voxel_count() const {
    auto m = static_cast<std::size_t>(resolution);
    return m * m * m;
  }

  // f32 serialization rounds origin/spacing, hence the tolerance.
  bool same_layout(const SdfGrid& other) const {
    auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-6; };
    return resolution == other.resolution && close(spacing, other.spacing) &&
           close(origin.x, other.origin.x) && close(origin.y, other.origin.y) &&
           close(origin.z, other.origin.z);
  }

  // Trilinear interpolation, clamped to the grid.
  double sample_trilinear(const Vec3& p) const;

  // Central-difference gradient of the interpolated field at p.
  Vec3 gradient_at(const Vec3& p) const;
};

// Signed distance of a watertight mesh: unsigned distance from a BVH, sign by
// parity of ray crossings with a majority vote over 3 fixed directions
// (degenerate hits retried with perturbed directions).
SdfGrid compute_sdf(const TriangleMesh& mesh, int resolution,
                    const Box3& extent = Box3::unit_domain());

// Same, reusing a prebuilt BVH.
SdfGrid compute_sdf(const Bvh& bvh, const TriangleMesh& mesh, int resolution,
                    const Box3& extent = Box3::unit_domain());

enum class AnalyticShape { sphere, box, capsule };

// Exact closed-form SDF grids, used as oracles for the mesh pipeline.
// params: sphere {r}; box {hx, hy, hz}; capsule {r, half_length} on the z axis.
SdfGrid analytic_sdf(AnalyticShape shape, const std::vector<double>& params,
                     int resolution, const Box3& extent = Box3::unit_domain());

// Grid sampled from an arbitrary implicit field.
SdfGrid sample_field(const ImplicitField& field, int resolution,
                     const Box3& extent = Box3::unit_domain());

struct EikonalResidual {
  double mean = 0.0;
  double max = 0.0;
  std::size_t voxels = 0;  // voxels included after masking
};

// Mean and max of (|grad phi| - 1)^2, central differences (one-sided at the
// domain boundary). mask_band > 0 excludes voxels with |phi| < mask_band and
// the 1-neighborhood of the medial-axis heuristic (gradient norm < 0.5).
EikonalResidual eikonal_residual(const SdfGrid& grid, double mask_band = 0.0);

// Occupied iff phi > 0 (interior).
std::vector<bool> occupancy(const SdfGrid& grid);

// Clamps values to [-band, band]; exposed so the effect of truncation on the
// latent basis can be measured.
void clamp_band(SdfGrid& grid, double band);

// Binary `ESDF` format: magic, u32 version=1, u32 M, 3xf32 origin, f32
// spacing, M^3 f32 little-endian, x-fastest. File round trips bit-exactly.
void save_sdf_grid(const SdfGrid& grid, const std::string& path);
SdfGrid load_sdf_grid(const std::string& path);

}  // namespace esdf
