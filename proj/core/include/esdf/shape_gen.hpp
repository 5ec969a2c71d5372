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

#include "esdf/mesh.hpp"

namespace esdf {

// Parameter layout per family (all lengths in world units, shapes sized to
// stay inside [-0.44, 0.44]^3):
//   ellipsoid:  {rx, ry, rz}                         each in [0.10, 0.42]
//   box:        {hx, hy, hz}                         each in [0.08, 0.42]
//   capsule:    {r, half_len, polar, azimuth}        r in [0.05, 0.20],
//               half_len in [0.0, 0.30] with r + half_len <= 0.44
//   table-like: {top_hw, top_hd, top_ht, leg_h, leg_hw}
//   chair-like: {seat_hw, seat_hd, seat_ht, leg_h, back_h, bar_ht}
//   blend:      {r_sphere, box_half, r_cap, cap_half_len, smooth_k}
//               (primitive placement comes from the spec seed)
//
// Ellipsoid/box/capsule are tessellated directly; the composite families are
// built as implicit smooth-min unions and extracted with marching cubes.
TriangleMesh generate_shape(const ShapeSpec& spec);

// Random spec with parameters drawn uniformly from the documented ranges.
ShapeSpec draw_shape_spec(ShapeFamily family, std::uint64_t seed);

// True when params has the right arity and every value is in range.
bool shape_params_valid(ShapeFamily family, const std::vector<double>& params);

}  // namespace esdf
