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

#include "esdf/sdf_grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "esdf/bvh.hpp"
#include "esdf/errors.hpp"
#include "esdf/parallel.hpp"

namespace esdf {

SdfGrid SdfGrid::make(int resolution, const Box3& extent) {
  if (resolution < 1) throw config_error("grid resolution must be >= 1");
  SdfGrid grid;
  grid.resolution = resolution;
  grid.spacing = max_component(extent.extent()) / resolution;
  grid.origin = extent.min + Vec3{0.5, 0.5, 0.5} * grid.spacing;
  grid.values.assign(grid.voxel_count(), 0.0);
  return grid;
}

double SdfGrid::sample_trilinear(const Vec3& p) const {
  const int m = resolution;
  double fx = (p.x - origin.x) / spacing;
  double fy = (p.y - origin.y) / spacing;
  double fz = (p.z - origin.z) / spacing;
  auto clamp_cell = [m](double f, int& i, double& t) {
    i = static_cast<int>(std::floor(f));
    if (i < 0) { i = 0; t = 0.0; }
    else if (i > m - 2) { i = m - 2; t = 1.0; }
    else t = f - i;
    t = std::clamp(t, 0.0, 1.0);
  };
  int x, y, z;
  double tx, ty, tz;
  clamp_cell(fx, x, tx);
  clamp_cell(fy, y, ty);
  clamp_cell(fz, z, tz);

  double c00 = at(x, y, z) * (1 - tx) + at(x + 1, y, z) * tx;
  double c10 = at(x, y + 1, z) * (1 - tx) + at(x + 1, y + 1, z) * tx;
  double c01 = at(x, y, z + 1) * (1 - tx) + at(x + 1, y, z + 1) * tx;
  double c11 = at(x, y + 1, z + 1) * (1 - tx) + at(x + 1, y + 1, z + 1) * tx;
  double c0 = c00 * (1 - ty) + c10 * ty;
  double c1 = c01 * (1 - ty) + c11 * ty;
  return c0 * (1 - tz) + c1 * tz;
}

Vec3 SdfGrid::gradient_at(const Vec3& p) const {
  double d = 0.5 * spacing;
  return Vec3{sample_trilinear({p.x + d, p.y, p.z}) - sample_trilinear({p.x - d, p.y, p.z}),
              sample_trilinear({p.x, p.y + d, p.z}) - sample_trilinear({p.x, p.y - d, p.z}),
              sample_trilinear({p.x, p.y, p.z + d}) - sample_trilinear({p.x, p.y, p.z - d})} /
         (2.0 * d);
}

namespace {

// Fixed, deliberately non-axis-aligned cast directions so rays through a
// regular voxel lattice do not skim axis-aligned faces.
const Vec3 kParityRays[3] = {
    normalized({0.8191725133, 0.3226219563, 0.4736297811}),
    normalized({-0.3626743322, 0.8677659754, -0.3400911801}),
    normalized({0.2173897243, -0.4431629793, 0.8696423761}),
};

bool inside_by_parity(const Bvh& bvh, const Vec3& p) {
  int votes = 0;
  for (const Vec3& base_dir : kParityRays) {
    Vec3 dir = base_dir;
    Bvh::CrossingCount cc;
    for (int attempt = 0; attempt < 8; ++attempt) {
      cc = bvh.count_crossings(p, dir);
      if (!cc.degenerate) break;
      // deterministic nudge away from the grazing configuration
      double s = 1e-4 * (attempt + 1);
      dir = normalized(base_dir + Vec3{s, s * 1.618033988, s * 2.414213562});
    }
    votes += (cc.count % 2 == 1) ? 1 : 0;
  }
  return votes >= 2;
}

}  // namespace

SdfGrid compute_sdf(const Bvh& bvh, const TriangleMesh& mesh, int resolution,
                    const Box3& extent) {
  if (resolution < 8) throw config_error("compute_sdf: resolution must be >= 8");
  if (!is_watertight(mesh))
    throw data_error("compute_sdf: mesh is not watertight, sign undefined");

  SdfGrid grid = SdfGrid::make(resolution, extent);
  const int m = resolution;
  const std::size_t slab = static_cast<std::size_t>(m) * m;

  parallel_for(static_cast<std::size_t>(m), [&](std::size_t z) {
    std::size_t idx = z * slab;
    for (int y = 0; y < m; ++y) {
      for (int x = 0; x < m; ++x, ++idx) {
        Vec3 p = grid.voxel_center(x, y, static_cast<int>(z));
        double dist = bvh.distance(p);
        grid.values[idx] = inside_by_parity(bvh, p) ? dist : -dist;
      }
    }
  });
  return grid;
}

SdfGrid compute_sdf(const TriangleMesh& mesh, int resolution, const Box3& extent) {
  Bvh bvh(mesh);
  return compute_sdf(bvh, mesh, resolution, extent);
}

SdfGrid sample_field(const ImplicitField& field, int resolution, const Box3& extent) {
  SdfGrid grid = SdfGrid::make(resolution, extent);
  const int m = resolution;
  const std::size_t slab = static_cast<std::size_t>(m) * m;
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t z) {
    std::size_t idx = z * slab;
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < m; ++x, ++idx)
        grid.values[idx] = field(grid.voxel_center(x, y, static_cast<int>(z)));
  });
  return grid;
}

SdfGrid analytic_sdf(AnalyticShape shape, const std::vector<double>& params,
                     int resolution, const Box3& extent) {
  switch (shape) {
    case AnalyticShape::sphere: {
      if (params.size() != 1 || params[0] <= 0.0)
        throw config_error("analytic_sdf sphere: params must be {r > 0}");
      double r = params[0];
      return sample_field([r](const Vec3& p) { return sd_sphere(p, r); }, resolution,
                          extent);
    }
    case AnalyticShape::box: {
      if (params.size() != 3 || params[0] <= 0 || params[1] <= 0 || params[2] <= 0)
        throw config_error("analytic_sdf box: params must be {hx, hy, hz} > 0");
      Vec3 half{params[0], params[1], params[2]};
      return sample_field([half](const Vec3& p) { return sd_box(p, half); }, resolution,
                          extent);
    }
    case AnalyticShape::capsule: {
      if (params.size() != 2 || params[0] <= 0 || params[1] < 0)
        throw config_error("analytic_sdf capsule: params must be {r > 0, half_len >= 0}");
      double r = params[0], hl = params[1];
      Vec3 a{0, 0, -hl}, b{0, 0, hl};
      return sample_field([=](const Vec3& p) { return sd_capsule(p, a, b, r); },
                          resolution, extent);
    }
  }
  throw config_error("analytic_sdf: unknown shape");
}

namespace {

// Central differences, one-sided at the domain boundary.
inline Vec3 grid_gradient(const SdfGrid& g, int x, int y, int z) {
  const int m = g.resolution;
  const double h = g.spacing;
  auto diff = [&](int a) {
    int c[3] = {x, y, z};
    if (c[a] == 0) {
      int hi[3] = {x, y, z};
      hi[a] += 1;
      return (g.at(hi[0], hi[1], hi[2]) - g.at(x, y, z)) / h;
    }
    if (c[a] == m - 1) {
      int lo[3] = {x, y, z};
      lo[a] -= 1;
      return (g.at(x, y, z) - g.at(lo[0], lo[1], lo[2])) / h;
    }
    int hi[3] = {x, y, z}, lo[3] = {x, y, z};
    hi[a] += 1;
    lo[a] -= 1;
    return (g.at(hi[0], hi[1], hi[2]) - g.at(lo[0], lo[1], lo[2])) / (2.0 * h);
  };
  return {diff(0), diff(1), diff(2)};
}

}  // namespace

EikonalResidual eikonal_residual(const SdfGrid& grid, double mask_band) {
  if (grid.resolution < 8) throw config_error("eikonal_residual: resolution must be >= 8");
  const int m = grid.resolution;

  std::vector<bool> exclude;
  if (mask_band > 0.0) {
    exclude.assign(grid.voxel_count(), false);
    // medial-axis heuristic: the gradient norm of a true SDF collapses on
    // the skeleton; flag those voxels and their 1-neighborhood
    for (int z = 0; z < m; ++z)
      for (int y = 0; y < m; ++y)
        for (int x = 0; x < m; ++x) {
          if (std::fabs(grid.at(x, y, z)) < mask_band) {
            exclude[grid.index(x, y, z)] = true;
            continue;
          }
          if (norm(grid_gradient(grid, x, y, z)) < 0.5) {
            for (int dz = -1; dz <= 1; ++dz)
              for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                  int nx = x + dx, ny = y + dy, nz = z + dz;
                  if (nx >= 0 && nx < m && ny >= 0 && ny < m && nz >= 0 && nz < m)
                    exclude[grid.index(nx, ny, nz)] = true;
                }
          }
        }
  }

  EikonalResidual result;
  double sum = 0.0;
  for (int z = 0; z < m; ++z)
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < m; ++x) {
        if (!exclude.empty() && exclude[grid.index(x, y, z)]) continue;
        double dev = norm(grid_gradient(grid, x, y, z)) - 1.0;
        double r = dev * dev;
        sum += r;
        result.max = std::max(result.max, r);
        ++result.voxels;
      }
  result.mean = result.voxels > 0 ? sum / static_cast<double>(result.voxels) : 0.0;
  return result;
}

std::vector<bool> occupancy(const SdfGrid& grid) {
  std::vector<bool> occ(grid.voxel_count());
  for (std::size_t i = 0; i < grid.values.size(); ++i) occ[i] = grid.values[i] > 0.0;
  return occ;
}

void clamp_band(SdfGrid& grid, double band) {
  if (band <= 0.0) throw config_error("clamp_band: band must be > 0");
  for (double& v : grid.values) v = std::clamp(v, -band, band);
}

namespace {

constexpr char kGridMagic[4] = {'E', 'S', 'D', 'F'};
constexpr std::uint32_t kGridVersion = 1;

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_sdf_grid(const SdfGrid& grid, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw data_error("cannot write grid file: " + path);
    out.write(kGridMagic, 4);
    write_raw<std::uint32_t>(out, kGridVersion);
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(grid.resolution));
    write_raw<float>(out, static_cast<float>(grid.origin.x));
    write_raw<float>(out, static_cast<float>(grid.origin.y));
    write_raw<float>(out, static_cast<float>(grid.origin.z));
    write_raw<float>(out, static_cast<float>(grid.spacing));
    std::vector<float> f32(grid.values.size());
    for (std::size_t i = 0; i < f32.size(); ++i) f32[i] = static_cast<float>(grid.values[i]);
    out.write(reinterpret_cast<const char*>(f32.data()),
              static_cast<std::streamsize>(f32.size() * sizeof(float)));
    if (!out) throw data_error("short write: " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw data_error("cannot finalize grid file: " + path);
}

SdfGrid load_sdf_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open grid file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kGridMagic, 4) != 0)
    throw data_error("not an ESDF grid file: " + path);
  auto version = read_raw<std::uint32_t>(in);
  if (version != kGridVersion)
    throw data_error("unsupported ESDF version in " + path);
  SdfGrid grid;
  grid.resolution = static_cast<int>(read_raw<std::uint32_t>(in));
  grid.origin.x = read_raw<float>(in);
  grid.origin.y = read_raw<float>(in);
  grid.origin.z = read_raw<float>(in);
  grid.spacing = read_raw<float>(in);
  if (grid.resolution < 1 || grid.resolution > 4096)
    throw data_error("implausible grid resolution in " + path);
  std::vector<float> f32(grid.voxel_count());
  in.read(reinterpret_cast<char*>(f32.data()),
          static_cast<std::streamsize>(f32.size() * sizeof(float)));
  if (!in) throw data_error("truncated grid file: " + path);
  grid.values.assign(f32.begin(), f32.end());
  return grid;
}

}  // namespace esdf
