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

#include "esdf/pca.hpp"
#include "esdf/sdf_loss.hpp"

namespace esdf {

struct LearningRateSchedule {
  double initial = 1e-3;
  int drop_epoch = 30;
  double dropped = 1e-4;

  double at(int epoch) const { return epoch >= drop_epoch ? dropped : initial; }
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct FinetuneConfig {
  int epochs = 30;
  LearningRateSchedule lr;
  AdamConfig adam;
  int batch = 8;
  LossConfig loss;          // epsilon = 0 resolves to 1.5 * grid spacing
  bool update_mean = true;  // the mean acts as the decoder bias
  bool update_codes = false;  // joint mode; decoder-only by default
  double abort_threshold = 1e6;
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double distance_term = 0.0;
  double eikonal_term = 0.0;
};

struct FinetuneResult {
  EigenBasis basis;                // finetuned = true
  std::vector<LatentCode> codes;   // updated only in joint mode
  std::vector<EpochStats> history;
};

// Minimizes the surface loss over the training set by Adam on the decoder
// weights (components and, by default, the mean). Codes stay frozen unless
// update_codes is set. Deterministic under seed; throws numeric_error with
// the epoch/step when the loss diverges past abort_threshold.
FinetuneResult finetune(const EigenBasis& basis, const std::vector<LatentCode>& codes,
                        const std::vector<SdfGrid>& truths, const FinetuneConfig& cfg,
                        std::uint64_t seed);

struct LinearAutoencoder {
  EigenBasis decoder;        // same shape as a PCA basis; eigenvalues unset
  Eigen::MatrixXd encoder;   // k x M^3
  std::vector<EpochStats> history;

  LatentCode encode(const SdfGrid& grid) const;
};

// Random-init linear autoencoder trained with per-voxel reconstruction MSE,
// the same parameter count as an EigenBasis plus the untied encoder. With
// finetune_with_sdf_loss the decoder then gets the same Eq-style finetuning
// as a PCA basis (codes frozen after the MSE phase).
LinearAutoencoder train_linear_ae(const std::vector<SdfGrid>& grids, int k,
                                  const FinetuneConfig& cfg, std::uint64_t seed,
                                  bool finetune_with_sdf_loss = false);

}  // namespace esdf
