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

#include "esdf/sdf_grid.hpp"

namespace esdf {

// Surface-aware training loss over a predicted SDF grid:
//
//   L = ( sum_x delta_eps(pred(x)) * d(x)^p )^(1/p)
//     + alpha * sum_x (|grad pred(x)| - 1)^2
//
// where d(x) = |truth(x)| is the unsigned distance to the ground-truth
// surface and the gradient uses central differences (one-sided at the
// domain boundary). The first term concentrates error near the predicted
// zero set; the second rewards unit gradient norm.

enum class DeltaKind {
  poisson,  // eps / (pi (x^2 + eps^2)), smooth everywhere
  cosine,   // (1 + cos(pi x / eps)) / (2 eps) on [-eps, eps]
};

struct LossConfig {
  double epsilon = 0.0;  // width of the smoothed delta, world units
  int p = 2;             // distance exponent, 1 or 2
  double alpha = 0.01;   // eikonal weight
  DeltaKind delta_kind = DeltaKind::poisson;
  // > 0 restricts the eikonal sum to voxels with |truth| <= band; 0 sums
  // over the whole grid exactly as the loss is written.
  double eikonal_band = 0.0;

  // Conventional defaults: delta band spanning about 3 voxels.
  static LossConfig defaults_for_spacing(double h) {
    LossConfig cfg;
    cfg.epsilon = 1.5 * h;
    return cfg;
  }
};

double delta_eps(double x, double epsilon, DeltaKind kind = DeltaKind::poisson);
double delta_eps_deriv(double x, double epsilon, DeltaKind kind = DeltaKind::poisson);

struct LossParts {
  double distance_term = 0.0;  // the p-root term
  double eikonal_term = 0.0;   // alpha-weighted eikonal penalty
  double total() const { return distance_term + eikonal_term; }
};

LossParts sdf_loss_parts(const SdfGrid& pred, const SdfGrid& truth, const LossConfig& cfg);
double sdf_loss(const SdfGrid& pred, const SdfGrid& truth, const LossConfig& cfg);

// Analytic dL/dpred, matching sdf_loss to finite-difference accuracy. The
// eikonal part is the exact adjoint of the difference stencils.
std::vector<double> sdf_loss_grad(const SdfGrid& pred, const SdfGrid& truth,
                                  const LossConfig& cfg);

}  // namespace esdf
