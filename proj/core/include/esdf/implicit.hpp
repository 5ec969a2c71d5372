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

#include <algorithm>
#include <cmath>
#include <functional>

#include "esdf/vec3.hpp"

// Closed-form signed distance fields, interior-positive. Exact for sphere,
// box and capsule; smooth-min unions are conservative bounds, not exact
// distances, which is fine for surface extraction.

namespace esdf {

using ImplicitField = std::function<double(const Vec3&)>;

inline double sd_sphere(const Vec3& p, double r) { return r - norm(p); }

inline double sd_box(const Vec3& p, const Vec3& half) {
  Vec3 q = cwise_abs(p) - half;
  Vec3 outside = cwise_max(q, {0, 0, 0});
  double inside = std::min(0.0, max_component(q));
  return -(norm(outside) + inside);
}

// Capsule around the segment [a, b] with radius r.
inline double sd_capsule(const Vec3& p, const Vec3& a, const Vec3& b, double r) {
  Vec3 ab = b - a;
  double denom = norm2(ab);
  double t = denom > 0.0 ? std::clamp(dot(p - a, ab) / denom, 0.0, 1.0) : 0.0;
  return r - norm(p - (a + ab * t));
}

// Polynomial smooth union for interior-positive fields (k = 0 is a hard max).
inline double smooth_union(double d1, double d2, double k) {
  if (k <= 0.0) return std::max(d1, d2);
  double h = std::clamp(0.5 + 0.5 * (d1 - d2) / k, 0.0, 1.0);
  return d2 + (d1 - d2) * h + k * h * (1.0 - h);
}

}  // namespace esdf
