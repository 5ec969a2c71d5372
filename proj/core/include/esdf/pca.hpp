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

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "esdf/sdf_grid.hpp"

namespace esdf {

// Latent coefficients of one shape; length is the basis k.
using LatentCode = Eigen::VectorXd;

// Linear decoder over flattened SDF grids: phi ~ mean + code * components.
// Rows of `components` are orthonormal right after a PCA fit; finetuning
// with the surface loss deliberately gives that up.
struct EigenBasis {
  int grid_resolution = 0;             // M
  Eigen::VectorXd mean;                // M^3
  Eigen::MatrixXd components;          // k x M^3, rows are components
  Eigen::VectorXd eigenvalues;         // k, descending; population convention
  bool finetuned = false;
  std::int64_t sample_count = 0;       // N grids seen by the fit

  int k() const { return static_cast<int>(components.rows()); }
  std::int64_t dim() const { return static_cast<std::int64_t>(components.cols()); }

  // Max abs entry of E E^T - I; ~1e-14 after a fit, ~1e-7 after an f32
  // round trip through the EBAS file.
  double orthonormality_error() const;
};

// Pull-based grid source; returns nullopt when exhausted.
using GridStream = std::function<std::optional<SdfGrid>()>;

struct PcaOptions {
  int batch_size = 32;
  int k_max = 64;
  bool center = true;  // maintain and subtract the running mean
};

// Incremental PCA over flattened grids: each batch is centered, augmented
// with the scaled mean-shift vector, merged with the current model through
// one thin SVD, and truncated back to k_max components. Memory stays at
// O((k_max + batch) * M^3) regardless of the stream length.
EigenBasis fit_incremental(const GridStream& stream, const PcaOptions& options);
EigenBasis fit_incremental(const std::vector<SdfGrid>& grids, const PcaOptions& options);

// Smallest k whose leading eigenvalues reach the target variance fraction.
int select_k(const Eigen::VectorXd& eigenvalues, double variance_target);

// Keeps the leading k components (k <= basis.k()).
EigenBasis truncate_basis(const EigenBasis& basis, int k);

LatentCode encode(const SdfGrid& grid, const EigenBasis& basis);
SdfGrid decode(const LatentCode& code, const EigenBasis& basis);

// Grid layout implied by the shared-domain convention (extent [-0.5, 0.5]^3).
SdfGrid empty_grid_for_basis(const EigenBasis& basis);

// Binary `EBAS` format: magic, u32 version=1, u32 k, u32 M, u8 finetuned,
// f32 mean[M^3], f32 eigenvalues[k], f32 components[k*M^3], little-endian.
void save_basis(const EigenBasis& basis, const std::string& path);
EigenBasis load_basis(const std::string& path);

}  // namespace esdf
