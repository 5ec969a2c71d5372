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

// Reconstruction quality of one (prediction, ground truth) pair.
struct EvalReport {
  double iou = 0.0;                 // in [0, 1]
  double chamfer = 0.0;             // world units, unsquared distances
  double normal_consistency = 0.0;  // in [0, 1]
  double fscore = 0.0;              // in [0, 1] at threshold tau
  std::size_t n_points = 0;
  double tau = 0.0;
  bool empty_prediction = false;    // metrics hold worst-case sentinels
};

// |a and b| / |a or b|, defined as 1 when both are empty.
double iou(const std::vector<bool>& a, const std::vector<bool>& b);

// Symmetric Chamfer distance with unsquared Euclidean norms:
// mean of directed nearest-neighbor averages, both directions halved.
double chamfer(const std::vector<Vec3>& p, const std::vector<Vec3>& q);

// Symmetric mean absolute cosine between normals at nearest-neighbor pairs.
double normal_consistency(const std::vector<SurfaceSample>& p,
                          const std::vector<SurfaceSample>& q);

// Harmonic mean of precision (q within tau of p) and recall (p within tau
// of q); 0 when both vanish.
double fscore(const std::vector<Vec3>& ground_truth, const std::vector<Vec3>& predicted,
              double tau);

struct EvaluateOptions {
  std::size_t n_points = 2048;
  double tau = 0.01;
  std::uint64_t seed = 0;
};

// End-to-end harness: occupancy IoU against the mesh SDF at the prediction's
// resolution, then surface extraction and point metrics. An empty predicted
// surface reports worst-case chamfer/nc/fscore and sets the flag.
EvalReport evaluate(const SdfGrid& pred, const TriangleMesh& gt_mesh,
                    const EvaluateOptions& options = {});

// Same, reusing a precomputed ground-truth grid (layout must match pred).
EvalReport evaluate(const SdfGrid& pred, const TriangleMesh& gt_mesh,
                    const SdfGrid& gt_grid, const EvaluateOptions& options = {});

}  // namespace esdf
