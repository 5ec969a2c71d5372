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
#include <string>
#include <variant>
#include <vector>

#include "esdf/finetune.hpp"
#include "esdf/mesh.hpp"
#include "esdf/pca.hpp"

namespace esdf {

// Noisy surface point cloud for the completion task.
struct PointCloudInput {
  std::vector<Vec3> points;
  struct Provenance {
    std::size_t n_sampled = 0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
  } provenance;
};

enum class RasterChannel { depth, silhouette };

// One orthographic view: R x R depth values along the view ray, with
// kRasterMissDepth where the ray misses, or a 0/1 silhouette.
struct ViewRaster {
  int resolution = 0;
  int azimuth = 0;
  RasterChannel channel = RasterChannel::depth;
  std::vector<double> values;  // row-major, R*R
};

inline constexpr double kRasterMissDepth = 2.0;

// Area-weighted surface samples plus iid Gaussian noise per coordinate.
PointCloudInput make_input_pointcloud(const TriangleMesh& mesh, std::size_t n = 300,
                                      double sigma = 0.05, std::uint64_t seed = 0);

// Orthographic depth render from one of n_azimuths equally spaced angles
// around the vertical axis (index wraps). Camera plane at distance 1.
ViewRaster rasterize_view(const TriangleMesh& mesh, int azimuth, int n_azimuths = 8,
                          int resolution = 32);

ViewRaster to_silhouette(const ViewRaster& depth);

// Latent-code regressor. Point-cloud variant: shared per-point affine+ReLU
// stack, coordinatewise max pool, affine head. View variant: plain MLP over
// the flattened raster. Weights row-major, layer output = W x + b.
struct EncoderModel {
  enum class Kind { pointcloud, view };

  struct Layer {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;
  };

  Kind kind = Kind::pointcloud;
  std::vector<Layer> per_point;  // empty for the view variant
  std::vector<Layer> head;       // last layer is linear
  int raster_resolution = 0;     // view variant input side length

  int output_dim() const { return static_cast<int>(head.back().bias.size()); }
};

// He-initialized models, seed-deterministic. Desk-scale defaults follow the
// per-point widths 3 -> 64 -> 128 -> pooled, pooled 64 (512 at full scale).
EncoderModel make_pointcloud_encoder(int k, std::uint64_t seed, int pooled_width = 64,
                                     const std::vector<int>& point_widths = {64, 128},
                                     const std::vector<int>& head_widths = {64});
EncoderModel make_view_encoder(int k, int raster_resolution, std::uint64_t seed,
                               const std::vector<int>& hidden_widths = {128, 64});

using EncoderInput = std::variant<PointCloudInput, ViewRaster>;

LatentCode encoder_forward(const EncoderModel& model, const PointCloudInput& input);
LatentCode encoder_forward(const EncoderModel& model, const ViewRaster& input);
LatentCode encoder_forward(const EncoderModel& model, const EncoderInput& input);

struct EncoderExample {
  EncoderInput input;
  LatentCode target;
};

// Adam on the squared-error-to-codes objective; backprop is manual through
// the affine/ReLU/max layers (max ties route to the lowest point index).
std::vector<EpochStats> train_encoder(EncoderModel& model,
                                      const std::vector<EncoderExample>& dataset,
                                      const FinetuneConfig& cfg, std::uint64_t seed);

// Binary `EENC` format: magic, version, kind, architecture widths, then f32
// parameters per layer (weights row-major, then bias).
void save_encoder(const EncoderModel& model, const std::string& path);
EncoderModel load_encoder(const std::string& path);

}  // namespace esdf
