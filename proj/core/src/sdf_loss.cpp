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

#include "esdf/sdf_loss.hpp"

#include <cmath>
#include <numbers>

#include "esdf/errors.hpp"

namespace esdf {

namespace {

using std::numbers::pi;

constexpr double kRootGuard = 1e-12;  // keeps the p-root differentiable at S = 0
constexpr double kNormGuard = 1e-12;

void validate(const SdfGrid& pred, const SdfGrid& truth, const LossConfig& cfg) {
  if (!pred.same_layout(truth)) throw data_error("sdf loss: grid layout mismatch");
  if (pred.resolution < 2) throw config_error("sdf loss: resolution must be >= 2");
  if (cfg.epsilon <= 0.0) throw config_error("sdf loss: epsilon must be > 0");
  if (cfg.p != 1 && cfg.p != 2) throw config_error("sdf loss: p must be 1 or 2");
  if (cfg.alpha < 0.0) throw config_error("sdf loss: alpha must be >= 0");
  for (double v : pred.values)
    if (!std::isfinite(v)) throw numeric_error("sdf loss: nonfinite prediction value");
}

// Central-difference gradient component, one-sided at the boundary.
inline double axis_gradient(const SdfGrid& g, int x, int y, int z, int axis) {
  const int m = g.resolution;
  const double h = g.spacing;
  int c[3] = {x, y, z};
  int hi[3] = {x, y, z}, lo[3] = {x, y, z};
  if (c[axis] == 0) {
    hi[axis] += 1;
    return (g.at(hi[0], hi[1], hi[2]) - g.at(x, y, z)) / h;
  }
  if (c[axis] == m - 1) {
    lo[axis] -= 1;
    return (g.at(x, y, z) - g.at(lo[0], lo[1], lo[2])) / h;
  }
  hi[axis] += 1;
  lo[axis] -= 1;
  return (g.at(hi[0], hi[1], hi[2]) - g.at(lo[0], lo[1], lo[2])) / (2.0 * h);
}

inline bool eikonal_included(const SdfGrid& truth, std::size_t i, double band) {
  return band <= 0.0 || std::fabs(truth.values[i]) <= band;
}

}  // namespace

double delta_eps(double x, double epsilon, DeltaKind kind) {
  switch (kind) {
    case DeltaKind::poisson:
      return epsilon / (pi * (x * x + epsilon * epsilon));
    case DeltaKind::cosine:
      if (std::fabs(x) >= epsilon) return 0.0;
      return (1.0 + std::cos(pi * x / epsilon)) / (2.0 * epsilon);
  }
  return 0.0;
}

double delta_eps_deriv(double x, double epsilon, DeltaKind kind) {
  switch (kind) {
    case DeltaKind::poisson: {
      double q = x * x + epsilon * epsilon;
      return -2.0 * epsilon * x / (pi * q * q);
    }
    case DeltaKind::cosine:
      if (std::fabs(x) >= epsilon) return 0.0;
      return -pi * std::sin(pi * x / epsilon) / (2.0 * epsilon * epsilon);
  }
  return 0.0;
}

LossParts sdf_loss_parts(const SdfGrid& pred, const SdfGrid& truth, const LossConfig& cfg) {
  validate(pred, truth, cfg);
  const int m = pred.resolution;

  double s = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    double d = std::fabs(truth.values[i]);
    double dp = cfg.p == 1 ? d : d * d;
    s += delta_eps(pred.values[i], cfg.epsilon, cfg.delta_kind) * dp;
  }

  double eikonal = 0.0;
  if (cfg.alpha > 0.0) {
    std::size_t i = 0;
    for (int z = 0; z < m; ++z)
      for (int y = 0; y < m; ++y)
        for (int x = 0; x < m; ++x, ++i) {
          if (!eikonal_included(truth, i, cfg.eikonal_band)) continue;
          double gx = axis_gradient(pred, x, y, z, 0);
          double gy = axis_gradient(pred, x, y, z, 1);
          double gz = axis_gradient(pred, x, y, z, 2);
          double dev = std::sqrt(gx * gx + gy * gy + gz * gz) - 1.0;
          eikonal += dev * dev;
        }
  }

  LossParts parts;
  parts.distance_term =
      cfg.p == 1 ? std::max(s, kRootGuard) : std::sqrt(std::max(s, kRootGuard));
  parts.eikonal_term = cfg.alpha * eikonal;
  if (!std::isfinite(parts.total())) throw numeric_error("sdf loss: nonfinite loss");
  return parts;
}

double sdf_loss(const SdfGrid& pred, const SdfGrid& truth, const LossConfig& cfg) {
  return sdf_loss_parts(pred, truth, cfg).total();
}

std::vector<double> sdf_loss_grad(const SdfGrid& pred, const SdfGrid& truth,
                                  const LossConfig& cfg) {
  validate(pred, truth, cfg);
  const int m = pred.resolution;
  const double h = pred.spacing;
  const std::size_t n = pred.values.size();
  std::vector<double> grad(n, 0.0);

  // distance term: (1/p) S^(1/p - 1) delta'(pred) d^p per voxel
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = std::fabs(truth.values[i]);
    double dp = cfg.p == 1 ? d : d * d;
    s += delta_eps(pred.values[i], cfg.epsilon, cfg.delta_kind) * dp;
  }
  if (s > kRootGuard) {
    double chain = cfg.p == 1 ? 1.0 : 0.5 / std::sqrt(s);
    for (std::size_t i = 0; i < n; ++i) {
      double d = std::fabs(truth.values[i]);
      double dp = cfg.p == 1 ? d : d * d;
      grad[i] = chain * delta_eps_deriv(pred.values[i], cfg.epsilon, cfg.delta_kind) * dp;
    }
  }

  if (cfg.alpha == 0.0) return grad;

  // eikonal term: w = 2 (|g| - 1) g / |g| per voxel, then the adjoint of the
  // difference stencils gathers the per-axis weights into each voxel
  std::vector<double> w(3 * n, 0.0);
  {
    std::size_t i = 0;
    for (int z = 0; z < m; ++z)
      for (int y = 0; y < m; ++y)
        for (int x = 0; x < m; ++x, ++i) {
          if (!eikonal_included(truth, i, cfg.eikonal_band)) continue;
          double g[3] = {axis_gradient(pred, x, y, z, 0), axis_gradient(pred, x, y, z, 1),
                         axis_gradient(pred, x, y, z, 2)};
          double nrm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
          if (nrm < kNormGuard) continue;
          double scale = 2.0 * cfg.alpha * (nrm - 1.0) / nrm;
          w[3 * i + 0] = scale * g[0];
          w[3 * i + 1] = scale * g[1];
          w[3 * i + 2] = scale * g[2];
        }
  }

  std::size_t stride[3] = {1, static_cast<std::size_t>(m),
                           static_cast<std::size_t>(m) * static_cast<std::size_t>(m)};
  std::size_t i = 0;
  for (int z = 0; z < m; ++z)
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < m; ++x, ++i) {
        int c[3] = {x, y, z};
        double acc = 0.0;
        for (int a = 0; a < 3; ++a) {
          int pos = c[a];
          // stencil of the lower neighbor uses this voxel with + sign
          if (pos >= 1) {
            double wa = w[3 * (i - stride[a]) + a];
            acc += (pos - 1 == 0) ? wa / h : wa / (2.0 * h);
          }
          // stencil of the upper neighbor uses this voxel with - sign
          if (pos <= m - 2) {
            double wa = w[3 * (i + stride[a]) + a];
            acc -= (pos + 1 == m - 1) ? wa / h : wa / (2.0 * h);
          }
          // one-sided stencil at this voxel includes the voxel itself
          if (pos == 0) acc -= w[3 * i + a] / h;
          else if (pos == m - 1) acc += w[3 * i + a] / h;
        }
        grad[i] += acc;
      }

  return grad;
}

}  // namespace esdf
