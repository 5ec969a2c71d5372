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

#include "esdf/encoders.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>

#include "esdf/bvh.hpp"
#include "esdf/errors.hpp"
#include "esdf/rng.hpp"

namespace esdf {

namespace {

using std::numbers::pi;

Eigen::MatrixXd he_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  double scale = std::sqrt(2.0 / static_cast<double>(cols));
  Eigen::MatrixXd w(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = scale * rng.normal();
  return w;
}

EncoderModel::Layer make_layer(int in, int out, Rng& rng) {
  return {he_matrix(out, in, rng), Eigen::VectorXd::Zero(out)};
}

inline void relu_inplace(Eigen::MatrixXd& x) { x = x.cwiseMax(0.0); }

Eigen::VectorXd raster_features(const ViewRaster& raster) {
  return Eigen::Map<const Eigen::VectorXd>(raster.values.data(),
                                           static_cast<Eigen::Index>(raster.values.size()));
}

Eigen::MatrixXd cloud_features(const PointCloudInput& cloud) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(cloud.points.size()), 3);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = cloud.points[i].x;
    x(static_cast<Eigen::Index>(i), 1) = cloud.points[i].y;
    x(static_cast<Eigen::Index>(i), 2) = cloud.points[i].z;
  }
  return x;
}

// Forward pass keeping pre-activations and argmax rows for backprop.
struct ForwardTrace {
  // point stack: activations[l] is n_points x width_l (post-ReLU)
  std::vector<Eigen::MatrixXd> point_activations;
  std::vector<Eigen::Index> argmax;        // per pooled channel
  std::vector<Eigen::VectorXd> head_inputs;  // input to each head layer
  std::vector<Eigen::VectorXd> head_pre;     // pre-activation of each head layer
  Eigen::VectorXd output;
};

void head_forward(const EncoderModel& model, const Eigen::VectorXd& input,
                  ForwardTrace& trace) {
  Eigen::VectorXd h = input;
  for (std::size_t l = 0; l < model.head.size(); ++l) {
    trace.head_inputs.push_back(h);
    Eigen::VectorXd pre = model.head[l].weights * h + model.head[l].bias;
    trace.head_pre.push_back(pre);
    h = (l + 1 < model.head.size()) ? pre.cwiseMax(0.0) : pre;
  }
  trace.output = h;
}

ForwardTrace forward_trace(const EncoderModel& model, const PointCloudInput& cloud) {
  if (model.kind != EncoderModel::Kind::pointcloud)
    throw data_error("encoder_forward: model expects a view raster");
  if (cloud.points.empty()) throw data_error("encoder_forward: empty point cloud");

  ForwardTrace trace;
  Eigen::MatrixXd f = cloud_features(cloud);
  trace.point_activations.push_back(f);
  for (const auto& layer : model.per_point) {
    f = (f * layer.weights.transpose()).rowwise() + layer.bias.transpose();
    relu_inplace(f);
    trace.point_activations.push_back(f);
  }

  // coordinatewise max over points, ties to the lowest row
  Eigen::Index width = f.cols();
  Eigen::VectorXd pooled(width);
  trace.argmax.resize(width);
  for (Eigen::Index c = 0; c < width; ++c) {
    Eigen::Index best = 0;
    double best_v = f(0, c);
    for (Eigen::Index r = 1; r < f.rows(); ++r)
      if (f(r, c) > best_v) {
        best_v = f(r, c);
        best = r;
      }
    pooled[c] = best_v;
    trace.argmax[c] = best;
  }

  head_forward(model, pooled, trace);
  return trace;
}

ForwardTrace forward_trace(const EncoderModel& model, const ViewRaster& raster) {
  if (model.kind != EncoderModel::Kind::view)
    throw data_error("encoder_forward: model expects a point cloud");
  Eigen::VectorXd input = raster_features(raster);
  if (input.size() != model.head.front().weights.cols())
    throw data_error("encoder_forward: raster size does not match model input");
  ForwardTrace trace;
  head_forward(model, input, trace);
  return trace;
}

struct Gradients {
  std::vector<EncoderModel::Layer> per_point;
  std::vector<EncoderModel::Layer> head;

  void init_like(const EncoderModel& model) {
    auto zero_like = [](const std::vector<EncoderModel::Layer>& layers) {
      std::vector<EncoderModel::Layer> out;
      out.reserve(layers.size());
      for (const auto& l : layers)
        out.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                       Eigen::VectorXd::Zero(l.bias.size())});
      return out;
    };
    per_point = zero_like(model.per_point);
    head = zero_like(model.head);
  }
};

// Accumulates dL/dparams given dL/doutput; mirrors forward_trace.
void backward(const EncoderModel& model, const ForwardTrace& trace,
              const Eigen::VectorXd& grad_output, Gradients& grads) {
  Eigen::VectorXd g = grad_output;
  for (std::size_t l = model.head.size(); l-- > 0;) {
    if (l + 1 < model.head.size())
      g = (trace.head_pre[l].array() > 0.0).select(g, 0.0);
    grads.head[l].weights.noalias() += g * trace.head_inputs[l].transpose();
    grads.head[l].bias += g;
    if (l > 0 || model.kind == EncoderModel::Kind::pointcloud)
      g = model.head[l].weights.transpose() * g;
  }
  if (model.kind != EncoderModel::Kind::pointcloud) return;

  // unpool: gradient flows only to the argmax point per channel
  const Eigen::MatrixXd& top = trace.point_activations.back();
  Eigen::MatrixXd gp = Eigen::MatrixXd::Zero(top.rows(), top.cols());
  for (Eigen::Index c = 0; c < top.cols(); ++c) gp(trace.argmax[c], c) = g[c];

  for (std::size_t l = model.per_point.size(); l-- > 0;) {
    // post-activation values double as the ReLU mask (output 0 = blocked)
    const Eigen::MatrixXd& post = trace.point_activations[l + 1];
    gp = (post.array() > 0.0).select(gp, 0.0);
    const Eigen::MatrixXd& input = trace.point_activations[l];
    grads.per_point[l].weights.noalias() += gp.transpose() * input;
    grads.per_point[l].bias += gp.colwise().sum().transpose();
    if (l > 0) gp = gp * model.per_point[l].weights;
  }
}

}  // namespace

PointCloudInput make_input_pointcloud(const TriangleMesh& mesh, std::size_t n, double sigma,
                                      std::uint64_t seed) {
  PointCloudInput input;
  input.provenance = {n, sigma, seed};
  std::vector<SurfaceSample> samples = sample_surface(mesh, n, seed);
  input.points.reserve(n);
  Rng noise(seed ^ 0x6e6f697365ULL);
  for (const SurfaceSample& s : samples) {
    Vec3 p = s.point;
    if (sigma > 0.0)
      p += Vec3{noise.normal(0.0, sigma), noise.normal(0.0, sigma),
                noise.normal(0.0, sigma)};
    input.points.push_back(p);
  }
  return input;
}

ViewRaster rasterize_view(const TriangleMesh& mesh, int azimuth, int n_azimuths,
                          int resolution) {
  if (n_azimuths < 1 || resolution < 1)
    throw config_error("rasterize_view: bad azimuth count or resolution");
  if (mesh.faces.empty()) throw data_error("rasterize_view: empty mesh");

  int az = ((azimuth % n_azimuths) + n_azimuths) % n_azimuths;
  double theta = 2.0 * pi * az / n_azimuths;
  Vec3 eye{std::cos(theta), 0.0, std::sin(theta)};
  Vec3 dir = -eye;                       // toward the origin
  Vec3 right{-std::sin(theta), 0.0, std::cos(theta)};
  Vec3 up{0.0, 1.0, 0.0};
  constexpr double kHalfSpan = 0.7;      // covers the rotated unit-box footprint

  Bvh bvh(mesh);
  ViewRaster raster;
  raster.resolution = resolution;
  raster.azimuth = az;
  raster.channel = RasterChannel::depth;
  raster.values.assign(static_cast<std::size_t>(resolution) * resolution,
                       kRasterMissDepth);

  for (int row = 0; row < resolution; ++row) {
    double sv = kHalfSpan * (2.0 * (row + 0.5) / resolution - 1.0);
    for (int col = 0; col < resolution; ++col) {
      double su = kHalfSpan * (2.0 * (col + 0.5) / resolution - 1.0);
      Vec3 origin = eye + right * su + up * sv;
      RayHit hit = bvh.first_hit(origin, dir);
      if (std::isfinite(hit.t))
        raster.values[static_cast<std::size_t>(row) * resolution + col] =
            std::min(hit.t, kRasterMissDepth);
    }
  }
  return raster;
}

ViewRaster to_silhouette(const ViewRaster& depth) {
  ViewRaster sil = depth;
  sil.channel = RasterChannel::silhouette;
  for (double& v : sil.values) v = v < kRasterMissDepth ? 1.0 : 0.0;
  return sil;
}

EncoderModel make_pointcloud_encoder(int k, std::uint64_t seed, int pooled_width,
                                     const std::vector<int>& point_widths,
                                     const std::vector<int>& head_widths) {
  if (k < 1 || pooled_width < 1) throw config_error("make_pointcloud_encoder: bad widths");
  Rng rng(seed);
  EncoderModel model;
  model.kind = EncoderModel::Kind::pointcloud;
  int in = 3;
  for (int w : point_widths) {
    model.per_point.push_back(make_layer(in, w, rng));
    in = w;
  }
  model.per_point.push_back(make_layer(in, pooled_width, rng));
  in = pooled_width;
  for (int w : head_widths) {
    model.head.push_back(make_layer(in, w, rng));
    in = w;
  }
  model.head.push_back(make_layer(in, k, rng));
  return model;
}

EncoderModel make_view_encoder(int k, int raster_resolution, std::uint64_t seed,
                               const std::vector<int>& hidden_widths) {
  if (k < 1 || raster_resolution < 1) throw config_error("make_view_encoder: bad widths");
  Rng rng(seed);
  EncoderModel model;
  model.kind = EncoderModel::Kind::view;
  model.raster_resolution = raster_resolution;
  int in = raster_resolution * raster_resolution;
  for (int w : hidden_widths) {
    model.head.push_back(make_layer(in, w, rng));
    in = w;
  }
  model.head.push_back(make_layer(in, k, rng));
  return model;
}

LatentCode encoder_forward(const EncoderModel& model, const PointCloudInput& input) {
  return forward_trace(model, input).output;
}

LatentCode encoder_forward(const EncoderModel& model, const ViewRaster& input) {
  return forward_trace(model, input).output;
}

LatentCode encoder_forward(const EncoderModel& model, const EncoderInput& input) {
  return std::visit([&](const auto& in) { return encoder_forward(model, in); }, input);
}

std::vector<EpochStats> train_encoder(EncoderModel& model,
                                      const std::vector<EncoderExample>& dataset,
                                      const FinetuneConfig& cfg, std::uint64_t seed) {
  if (dataset.empty()) throw data_error("train_encoder: empty dataset");
  for (const EncoderExample& ex : dataset)
    if (ex.target.size() != model.output_dim())
      throw data_error("train_encoder: target length does not match model output");

  Gradients m_state, v_state;
  m_state.init_like(model);
  v_state.init_like(model);

  Rng rng(seed);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<EpochStats> history;
  long t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double lr = cfg.lr.at(epoch);
    EpochStats stats;
    stats.epoch = epoch;

    for (std::size_t start = 0; start < dataset.size(); start += cfg.batch) {
      std::size_t stop = std::min(dataset.size(), start + cfg.batch);
      double inv_batch = 1.0 / static_cast<double>(stop - start);

      Gradients grads;
      grads.init_like(model);
      for (std::size_t b = start; b < stop; ++b) {
        const EncoderExample& ex = dataset[order[b]];
        ForwardTrace trace = std::visit(
            [&](const auto& in) { return forward_trace(model, in); }, ex.input);
        Eigen::VectorXd residual = trace.output - ex.target;
        double loss = residual.squaredNorm();
        if (!std::isfinite(loss) || loss > cfg.abort_threshold)
          throw numeric_error("train_encoder: loss diverged at epoch " +
                              std::to_string(epoch));
        stats.mean_loss += loss;
        Eigen::VectorXd grad_out = inv_batch * 2.0 * residual;
        backward(model, trace, grad_out, grads);
      }

      ++t;
      double mc = 1.0 - std::pow(cfg.adam.beta1, static_cast<double>(t));
      double vc = 1.0 - std::pow(cfg.adam.beta2, static_cast<double>(t));
      auto step = [&](std::vector<EncoderModel::Layer>& layers,
                      std::vector<EncoderModel::Layer>& grad,
                      std::vector<EncoderModel::Layer>& mm,
                      std::vector<EncoderModel::Layer>& vv) {
        for (std::size_t l = 0; l < layers.size(); ++l) {
          mm[l].weights = cfg.adam.beta1 * mm[l].weights +
                          (1.0 - cfg.adam.beta1) * grad[l].weights;
          vv[l].weights = cfg.adam.beta2 * vv[l].weights +
                          (1.0 - cfg.adam.beta2) * grad[l].weights.cwiseProduct(grad[l].weights);
          layers[l].weights -=
              (lr / mc) * mm[l].weights.cwiseQuotient(
                              ((vv[l].weights / vc).cwiseSqrt().array() + cfg.adam.eps).matrix());
          mm[l].bias = cfg.adam.beta1 * mm[l].bias + (1.0 - cfg.adam.beta1) * grad[l].bias;
          vv[l].bias = cfg.adam.beta2 * vv[l].bias +
                       (1.0 - cfg.adam.beta2) * grad[l].bias.cwiseProduct(grad[l].bias);
          layers[l].bias -=
              (lr / mc) * mm[l].bias.cwiseQuotient(
                              ((vv[l].bias / vc).cwiseSqrt().array() + cfg.adam.eps).matrix());
        }
      };
      step(model.per_point, grads.per_point, m_state.per_point, v_state.per_point);
      step(model.head, grads.head, m_state.head, v_state.head);
    }

    stats.mean_loss /= static_cast<double>(dataset.size());
    history.push_back(stats);
  }
  return history;
}

namespace {

constexpr char kEncoderMagic[4] = {'E', 'E', 'N', 'C'};
constexpr std::uint32_t kEncoderVersion = 1;

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

void write_layers(std::ostream& out, const std::vector<EncoderModel::Layer>& layers) {
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(layers.size()));
  for (const auto& l : layers) {
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(l.weights.cols()));
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(l.weights.rows()));
  }
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c)
        write_raw<float>(out, static_cast<float>(l.weights(r, c)));
    for (Eigen::Index i = 0; i < l.bias.size(); ++i)
      write_raw<float>(out, static_cast<float>(l.bias[i]));
  }
}

std::vector<EncoderModel::Layer> read_layers(std::istream& in) {
  std::uint32_t n = read_raw<std::uint32_t>(in);
  if (n > 64) throw data_error("implausible EENC layer count");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dims(n);
  for (auto& d : dims) {
    d.first = read_raw<std::uint32_t>(in);
    d.second = read_raw<std::uint32_t>(in);
  }
  std::vector<EncoderModel::Layer> layers;
  layers.reserve(n);
  for (const auto& [in_w, out_w] : dims) {
    EncoderModel::Layer l;
    l.weights.resize(out_w, in_w);
    l.bias.resize(out_w);
    for (std::uint32_t r = 0; r < out_w; ++r)
      for (std::uint32_t c = 0; c < in_w; ++c) l.weights(r, c) = read_raw<float>(in);
    for (std::uint32_t i = 0; i < out_w; ++i) l.bias[i] = read_raw<float>(in);
    layers.push_back(std::move(l));
  }
  return layers;
}

}  // namespace

void save_encoder(const EncoderModel& model, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw data_error("cannot write encoder file: " + path);
    out.write(kEncoderMagic, 4);
    write_raw<std::uint32_t>(out, kEncoderVersion);
    write_raw<std::uint8_t>(out, model.kind == EncoderModel::Kind::pointcloud ? 0 : 1);
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(model.raster_resolution));
    write_layers(out, model.per_point);
    write_layers(out, model.head);
    if (!out) throw data_error("short write: " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw data_error("cannot finalize encoder file: " + path);
}

EncoderModel load_encoder(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open encoder file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kEncoderMagic, 4) != 0)
    throw data_error("not an EENC encoder file: " + path);
  if (read_raw<std::uint32_t>(in) != kEncoderVersion)
    throw data_error("unsupported EENC version in " + path);
  EncoderModel model;
  model.kind = read_raw<std::uint8_t>(in) == 0 ? EncoderModel::Kind::pointcloud
                                               : EncoderModel::Kind::view;
  model.raster_resolution = static_cast<int>(read_raw<std::uint32_t>(in));
  model.per_point = read_layers(in);
  model.head = read_layers(in);
  if (!in) throw data_error("truncated encoder file: " + path);
  if (model.head.empty()) throw data_error("EENC file has no head layers: " + path);
  return model;
}

}  // namespace esdf
