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

#include "esdf/shape_gen.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "esdf/errors.hpp"
#include "esdf/implicit.hpp"
#include "esdf/rng.hpp"
#include "esdf/sdf_grid.hpp"
#include "esdf/surface.hpp"

namespace esdf {

namespace {

using std::numbers::pi;

struct Range {
  double lo, hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// Documented parameter ranges; draw_shape_spec samples these and
// generate_shape rejects anything outside them.
constexpr Range kEllipsoidRadius{0.10, 0.42};
constexpr Range kBoxHalf{0.08, 0.42};
constexpr Range kCapsuleRadius{0.05, 0.20};
constexpr Range kCapsuleHalfLen{0.0, 0.30};
constexpr Range kTableTopHalf{0.18, 0.42};
constexpr Range kTableTopThick{0.02, 0.05};
constexpr Range kTableLegHeight{0.25, 0.55};
constexpr Range kTableLegHalf{0.03, 0.06};
constexpr Range kChairSeatHalf{0.10, 0.22};
constexpr Range kChairSeatThick{0.015, 0.035};
constexpr Range kChairLegHeight{0.20, 0.40};
constexpr Range kChairBackHeight{0.20, 0.40};
constexpr Range kChairBarHalf{0.025, 0.05};
constexpr Range kBlendSphere{0.08, 0.18};
constexpr Range kBlendBox{0.06, 0.16};
constexpr Range kBlendCapRadius{0.04, 0.10};
constexpr Range kBlendCapHalfLen{0.06, 0.18};
constexpr Range kBlendSmooth{0.02, 0.08};

[[noreturn]] void out_of_range(const ShapeSpec& spec) {
  std::ostringstream msg;
  msg << "generate_shape: parameter out of range for family " << family_name(spec.family)
      << " (";
  for (std::size_t i = 0; i < spec.params.size(); ++i)
    msg << (i ? ", " : "") << spec.params[i];
  msg << ")";
  throw config_error(msg.str());
}

// ---- tessellated primitives ----

constexpr int kSegments = 48;  // around the polar axis
constexpr int kRings = 24;     // pole-to-pole bands

TriangleMesh make_ellipsoid(double rx, double ry, double rz) {
  TriangleMesh mesh;
  mesh.vertices.push_back({0, 0, rz});  // north pole
  for (int i = 1; i < kRings; ++i) {
    double theta = pi * i / kRings;
    double s = std::sin(theta), c = std::cos(theta);
    for (int j = 0; j < kSegments; ++j) {
      double phi = 2.0 * pi * j / kSegments;
      mesh.vertices.push_back({rx * s * std::cos(phi), ry * s * std::sin(phi), rz * c});
    }
  }
  mesh.vertices.push_back({0, 0, -rz});  // south pole
  auto ring = [](int i, int j) {
    return static_cast<std::uint32_t>(1 + (i - 1) * kSegments + (j % kSegments));
  };
  std::uint32_t south = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
  for (int j = 0; j < kSegments; ++j) {
    mesh.faces.push_back({0, ring(1, j), ring(1, j + 1)});
    mesh.faces.push_back({south, ring(kRings - 1, j + 1), ring(kRings - 1, j)});
  }
  for (int i = 1; i < kRings - 1; ++i) {
    for (int j = 0; j < kSegments; ++j) {
      std::uint32_t a = ring(i, j), b = ring(i, j + 1);
      std::uint32_t c = ring(i + 1, j), d = ring(i + 1, j + 1);
      mesh.faces.push_back({a, c, d});
      mesh.faces.push_back({a, d, b});
    }
  }
  return mesh;
}

TriangleMesh make_box(double hx, double hy, double hz) {
  TriangleMesh mesh;
  mesh.vertices = {{-hx, -hy, -hz}, {hx, -hy, -hz}, {hx, hy, -hz}, {-hx, hy, -hz},
                   {-hx, -hy, hz},  {hx, -hy, hz},  {hx, hy, hz},  {-hx, hy, hz}};
  mesh.faces = {{0, 3, 2}, {0, 2, 1},   // bottom
                {4, 5, 6}, {4, 6, 7},   // top
                {0, 1, 5}, {0, 5, 4},   // front
                {2, 3, 7}, {2, 7, 6},   // back
                {0, 4, 7}, {0, 7, 3},   // left
                {1, 2, 6}, {1, 6, 5}};  // right
  return mesh;
}

// Capsule along z, then rotated so its axis points at (polar, azimuth).
TriangleMesh make_capsule(double r, double half_len, double polar, double azimuth) {
  constexpr int kHemiRings = 10;

  // pole-to-pole ring profile: upper cap, cylinder bottom, lower cap
  std::vector<std::pair<double, double>> profile;  // (radius, z)
  for (int i = 1; i <= kHemiRings; ++i) {
    double theta = 0.5 * pi * i / kHemiRings;
    profile.emplace_back(r * std::sin(theta), half_len + r * std::cos(theta));
  }
  if (half_len > 1e-12) profile.emplace_back(r, -half_len);
  for (int i = kHemiRings - 1; i >= 1; --i) {
    double theta = 0.5 * pi * i / kHemiRings;
    profile.emplace_back(r * std::sin(theta), -half_len - r * std::cos(theta));
  }

  TriangleMesh mesh;
  mesh.vertices.push_back({0, 0, half_len + r});
  for (const auto& [radius, z] : profile) {
    for (int j = 0; j < kSegments; ++j) {
      double phi = 2.0 * pi * j / kSegments;
      mesh.vertices.push_back({radius * std::cos(phi), radius * std::sin(phi), z});
    }
  }
  mesh.vertices.push_back({0, 0, -half_len - r});

  int n_rings = static_cast<int>(profile.size());
  auto ring = [&](int i, int j) {  // i in [1, n_rings]
    return static_cast<std::uint32_t>(1 + (i - 1) * kSegments + (j % kSegments));
  };
  std::uint32_t bottom = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
  for (int j = 0; j < kSegments; ++j) {
    mesh.faces.push_back({0, ring(1, j), ring(1, j + 1)});
    mesh.faces.push_back({bottom, ring(n_rings, j + 1), ring(n_rings, j)});
  }
  for (int i = 1; i < n_rings; ++i) {
    for (int j = 0; j < kSegments; ++j) {
      std::uint32_t a = ring(i, j), b = ring(i, j + 1);
      std::uint32_t c = ring(i + 1, j), d = ring(i + 1, j + 1);
      mesh.faces.push_back({a, c, d});
      mesh.faces.push_back({a, d, b});
    }
  }

  // rotate +z onto the requested axis
  double sp = std::sin(polar), cp = std::cos(polar);
  double sa = std::sin(azimuth), ca = std::cos(azimuth);
  for (Vec3& v : mesh.vertices) {
    Vec3 ry{v.x * cp + v.z * sp, v.y, -v.x * sp + v.z * cp};
    v = {ry.x * ca - ry.y * sa, ry.x * sa + ry.y * ca, ry.z};
  }
  return mesh;
}

// ---- implicit composite families ----

TriangleMesh extract_implicit(const ImplicitField& field, int resolution) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    int res = attempt == 0 ? resolution : resolution * 3 / 2;
    SdfGrid grid = sample_field(field, res);
    IsoSurface iso = marching_cubes(grid);
    if (!iso.empty && is_watertight(iso.mesh)) return std::move(iso.mesh);
  }
  throw numeric_error("generate_shape: implicit surface extraction failed");
}

ImplicitField table_field(double top_hw, double top_hd, double top_ht, double leg_h,
                          double leg_hw) {
  double total = leg_h + 2.0 * top_ht;
  double base = -0.5 * total;
  double top_cy = base + leg_h + top_ht;
  // legs run into the slab so the union has no sliver gaps
  double leg_hh = 0.5 * (leg_h + 0.02);
  double leg_cy = base + leg_hh;
  double lx = top_hw - leg_hw - 0.02;
  double lz = top_hd - leg_hw - 0.02;
  Vec3 top_half{top_hw, top_ht, top_hd};
  Vec3 leg_half{leg_hw, leg_hh, leg_hw};
  return [=](const Vec3& p) {
    double d = sd_box(p - Vec3{0, top_cy, 0}, top_half);
    for (int sx = -1; sx <= 1; sx += 2)
      for (int sz = -1; sz <= 1; sz += 2) {
        Vec3 c{sx * lx, leg_cy, sz * lz};
        d = smooth_union(d, sd_box(p - c, leg_half), 0.01);
      }
    return d;
  };
}

ImplicitField chair_field(double seat_hw, double seat_hd, double seat_ht, double leg_h,
                          double back_h, double bar_ht) {
  double total = leg_h + 2.0 * seat_ht + back_h;
  double base = -0.5 * total;
  double seat_cy = base + leg_h + seat_ht;
  double leg_hh = 0.5 * (leg_h + 0.02);
  double leg_cy = base + leg_hh;
  double lx = seat_hw - bar_ht - 0.015;
  double lz = seat_hd - bar_ht - 0.015;
  double back_hh = 0.5 * (back_h + 0.02);
  double back_cy = base + leg_h + 2.0 * seat_ht + back_hh - 0.02;
  double back_cz = -(seat_hd - bar_ht);
  Vec3 seat_half{seat_hw, seat_ht, seat_hd};
  Vec3 leg_half{bar_ht, leg_hh, bar_ht};
  Vec3 back_half{seat_hw, back_hh, bar_ht};
  return [=](const Vec3& p) {
    double d = sd_box(p - Vec3{0, seat_cy, 0}, seat_half);
    for (int sx = -1; sx <= 1; sx += 2)
      for (int sz = -1; sz <= 1; sz += 2) {
        Vec3 c{sx * lx, leg_cy, sz * lz};
        d = smooth_union(d, sd_box(p - c, leg_half), 0.01);
      }
    d = smooth_union(d, sd_box(p - Vec3{0, back_cy, back_cz}, back_half), 0.01);
    return d;
  };
}

ImplicitField blend_field(double r_sphere, double box_half, double r_cap,
                          double cap_half_len, double smooth_k, std::uint64_t seed) {
  Rng rng(seed ^ 0x626c656e64ULL);
  auto place = [&](double size) {
    double span = std::min(0.22, 0.42 - size);
    return Vec3{rng.uniform(-span, span), rng.uniform(-span, span),
                rng.uniform(-span, span)};
  };
  Vec3 p_sphere = place(r_sphere);
  Vec3 p_box = place(box_half);
  Vec3 p_cap = place(r_cap + cap_half_len);
  double polar = std::acos(std::clamp(rng.uniform(-1.0, 1.0), -1.0, 1.0));
  double azim = rng.uniform(0.0, 2.0 * pi);
  Vec3 axis{std::sin(polar) * std::cos(azim), std::sin(polar) * std::sin(azim),
            std::cos(polar)};
  Vec3 cap_a = p_cap - axis * cap_half_len;
  Vec3 cap_b = p_cap + axis * cap_half_len;
  Vec3 box_vec{box_half, box_half, box_half};
  return [=](const Vec3& p) {
    double d = sd_sphere(p - p_sphere, r_sphere);
    d = smooth_union(d, sd_box(p - p_box, box_vec), smooth_k);
    d = smooth_union(d, sd_capsule(p, cap_a, cap_b, r_cap), smooth_k);
    return d;
  };
}

}  // namespace

bool shape_params_valid(ShapeFamily family, const std::vector<double>& params) {
  switch (family) {
    case ShapeFamily::ellipsoid:
      return params.size() == 3 && kEllipsoidRadius.contains(params[0]) &&
             kEllipsoidRadius.contains(params[1]) && kEllipsoidRadius.contains(params[2]);
    case ShapeFamily::box:
      return params.size() == 3 && kBoxHalf.contains(params[0]) &&
             kBoxHalf.contains(params[1]) && kBoxHalf.contains(params[2]);
    case ShapeFamily::capsule:
      return params.size() == 4 && kCapsuleRadius.contains(params[0]) &&
             kCapsuleHalfLen.contains(params[1]) && params[0] + params[1] <= 0.44 &&
             params[2] >= 0.0 && params[2] <= pi && params[3] >= 0.0 &&
             params[3] <= 2.0 * pi;
    case ShapeFamily::table_like:
      return params.size() == 5 && kTableTopHalf.contains(params[0]) &&
             kTableTopHalf.contains(params[1]) && kTableTopThick.contains(params[2]) &&
             kTableLegHeight.contains(params[3]) && kTableLegHalf.contains(params[4]);
    case ShapeFamily::chair_like:
      return params.size() == 6 && kChairSeatHalf.contains(params[0]) &&
             kChairSeatHalf.contains(params[1]) && kChairSeatThick.contains(params[2]) &&
             kChairLegHeight.contains(params[3]) && kChairBackHeight.contains(params[4]) &&
             kChairBarHalf.contains(params[5]);
    case ShapeFamily::blend:
      return params.size() == 5 && kBlendSphere.contains(params[0]) &&
             kBlendBox.contains(params[1]) && kBlendCapRadius.contains(params[2]) &&
             kBlendCapHalfLen.contains(params[3]) && kBlendSmooth.contains(params[4]);
  }
  return false;
}

TriangleMesh generate_shape(const ShapeSpec& spec) {
  if (!shape_params_valid(spec.family, spec.params)) out_of_range(spec);
  const auto& p = spec.params;
  switch (spec.family) {
    case ShapeFamily::ellipsoid:
      return make_ellipsoid(p[0], p[1], p[2]);
    case ShapeFamily::box:
      return make_box(p[0], p[1], p[2]);
    case ShapeFamily::capsule:
      return make_capsule(p[0], p[1], p[2], p[3]);
    case ShapeFamily::table_like:
      return extract_implicit(table_field(p[0], p[1], p[2], p[3], p[4]), 96);
    case ShapeFamily::chair_like:
      return extract_implicit(chair_field(p[0], p[1], p[2], p[3], p[4], p[5]), 96);
    case ShapeFamily::blend:
      return extract_implicit(blend_field(p[0], p[1], p[2], p[3], p[4], spec.seed), 64);
  }
  throw config_error("generate_shape: unknown family");
}

ShapeSpec draw_shape_spec(ShapeFamily family, std::uint64_t seed) {
  Rng rng(seed);
  auto draw = [&](Range r) { return rng.uniform(r.lo, r.hi); };
  ShapeSpec spec;
  spec.family = family;
  spec.seed = seed;
  switch (family) {
    case ShapeFamily::ellipsoid:
      spec.params = {draw(kEllipsoidRadius), draw(kEllipsoidRadius), draw(kEllipsoidRadius)};
      break;
    case ShapeFamily::box:
      spec.params = {draw(kBoxHalf), draw(kBoxHalf), draw(kBoxHalf)};
      break;
    case ShapeFamily::capsule: {
      double r = draw(kCapsuleRadius);
      double hl = rng.uniform(kCapsuleHalfLen.lo, std::min(kCapsuleHalfLen.hi, 0.44 - r));
      spec.params = {r, hl, rng.uniform(0.0, pi), rng.uniform(0.0, 2.0 * pi)};
      break;
    }
    case ShapeFamily::table_like:
      spec.params = {draw(kTableTopHalf), draw(kTableTopHalf), draw(kTableTopThick),
                     draw(kTableLegHeight), draw(kTableLegHalf)};
      break;
    case ShapeFamily::chair_like:
      spec.params = {draw(kChairSeatHalf), draw(kChairSeatHalf), draw(kChairSeatThick),
                     draw(kChairLegHeight), draw(kChairBackHeight), draw(kChairBarHalf)};
      break;
    case ShapeFamily::blend:
      spec.params = {draw(kBlendSphere), draw(kBlendBox), draw(kBlendCapRadius),
                     draw(kBlendCapHalfLen), draw(kBlendSmooth)};
      break;
  }
  return spec;
}

}  // namespace esdf
