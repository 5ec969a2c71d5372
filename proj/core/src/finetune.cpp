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

#include "esdf/finetune.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "esdf/errors.hpp"
#include "esdf/rng.hpp"

namespace esdf {

namespace {

// Adam with bias correction over an arbitrary Eigen expression.
struct AdamState {
  Eigen::MatrixXd m, v;

  void init(Eigen::Index rows, Eigen::Index cols) {
    m = Eigen::MatrixXd::Zero(rows, cols);
    v = Eigen::MatrixXd::Zero(rows, cols);
  }

  void step(Eigen::Ref<Eigen::MatrixXd> weights, const Eigen::MatrixXd& grad,
            const AdamConfig& cfg, double lr, long t) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    double mc = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    double vc = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    weights -= (lr / mc) * m.cwiseQuotient(((v / vc).cwiseSqrt().array() + cfg.eps).matrix());
  }
};

LossConfig resolve_loss_config(LossConfig cfg, double spacing) {
  if (cfg.epsilon <= 0.0) cfg.epsilon = 1.5 * spacing;
  return cfg;
}

[[noreturn]] void diverged(int epoch, std::size_t step, double loss) {
  throw numeric_error("finetune: loss diverged at epoch " + std::to_string(epoch) +
                      ", step " + std::to_string(step) + " (loss = " +
                      std::to_string(loss) + ")");
}

Eigen::Map<const Eigen::VectorXd> flat(const SdfGrid& grid) {
  return {grid.values.data(), static_cast<Eigen::Index>(grid.values.size())};
}

}  // namespace

FinetuneResult finetune(const EigenBasis& basis, const std::vector<LatentCode>& codes,
                        const std::vector<SdfGrid>& truths, const FinetuneConfig& cfg,
                        std::uint64_t seed) {
  if (codes.size() != truths.size() || truths.empty())
    throw data_error("finetune: codes and truths must be nonempty and aligned");
  for (const LatentCode& c : codes)
    if (c.size() != basis.k()) throw data_error("finetune: code length mismatch");
  for (const SdfGrid& t : truths)
    if (static_cast<std::int64_t>(t.values.size()) != basis.dim())
      throw data_error("finetune: grid does not match basis dimension");
  if (cfg.epochs < 0 || cfg.batch < 1) throw config_error("finetune: bad epochs/batch");

  FinetuneResult result;
  result.basis = basis;
  result.basis.finetuned = true;
  result.codes = codes;
  if (cfg.epochs == 0) return result;

  const Eigen::Index k = basis.k();
  const Eigen::Index d = basis.dim();
  const std::size_t n_shapes = truths.size();
  const LossConfig loss_cfg = resolve_loss_config(cfg.loss, truths.front().spacing);

  Eigen::MatrixXd& components = result.basis.components;
  Eigen::VectorXd& mean = result.basis.mean;

  AdamState adam_components, adam_mean, adam_codes;
  adam_components.init(k, d);
  if (cfg.update_mean) adam_mean.init(d, 1);
  if (cfg.update_codes) adam_codes.init(static_cast<Eigen::Index>(n_shapes), k);

  Rng rng(seed);
  std::vector<std::size_t> order(n_shapes);
  std::iota(order.begin(), order.end(), std::size_t{0});

  SdfGrid pred = truths.front();
  long t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double lr = cfg.lr.at(epoch);
    EpochStats stats;
    stats.epoch = epoch;

    for (std::size_t start = 0; start < n_shapes; start += cfg.batch) {
      std::size_t stop = std::min(n_shapes, start + cfg.batch);
      double inv_batch = 1.0 / static_cast<double>(stop - start);

      Eigen::MatrixXd grad_components = Eigen::MatrixXd::Zero(k, d);
      Eigen::VectorXd grad_mean = Eigen::VectorXd::Zero(d);
      Eigen::MatrixXd grad_codes;
      if (cfg.update_codes) grad_codes = Eigen::MatrixXd::Zero(n_shapes, k);

      for (std::size_t b = start; b < stop; ++b) {
        std::size_t shape = order[b];
        const LatentCode& code = result.codes[shape];
        Eigen::Map<Eigen::VectorXd> pred_flat(pred.values.data(), d);
        pred_flat = mean + components.transpose() * code;

        LossParts parts = sdf_loss_parts(pred, truths[shape], loss_cfg);
        double loss = parts.total();
        if (!std::isfinite(loss) || loss > cfg.abort_threshold)
          diverged(epoch, start / cfg.batch, loss);
        stats.mean_loss += loss;
        stats.distance_term += parts.distance_term;
        stats.eikonal_term += parts.eikonal_term;

        std::vector<double> g = sdf_loss_grad(pred, truths[shape], loss_cfg);
        Eigen::Map<const Eigen::VectorXd> grad_pred(g.data(), d);
        grad_components.noalias() += inv_batch * code * grad_pred.transpose();
        if (cfg.update_mean) grad_mean += inv_batch * grad_pred;
        if (cfg.update_codes)
          grad_codes.row(static_cast<Eigen::Index>(shape)) =
              (components * grad_pred).transpose();
      }

      ++t;
      adam_components.step(components, grad_components, cfg.adam, lr, t);
      if (cfg.update_mean) adam_mean.step(mean, grad_mean, cfg.adam, lr, t);
      if (cfg.update_codes) {
        Eigen::MatrixXd code_mat(n_shapes, k);
        for (std::size_t sidx = 0; sidx < n_shapes; ++sidx)
          code_mat.row(static_cast<Eigen::Index>(sidx)) = result.codes[sidx].transpose();
        adam_codes.step(code_mat, grad_codes, cfg.adam, lr, t);
        for (std::size_t sidx = 0; sidx < n_shapes; ++sidx)
          result.codes[sidx] = code_mat.row(static_cast<Eigen::Index>(sidx)).transpose();
      }
    }

    double inv_n = 1.0 / static_cast<double>(n_shapes);
    stats.mean_loss *= inv_n;
    stats.distance_term *= inv_n;
    stats.eikonal_term *= inv_n;
    result.history.push_back(stats);
  }
  return result;
}

LatentCode LinearAutoencoder::encode(const SdfGrid& grid) const {
  if (static_cast<Eigen::Index>(grid.values.size()) != encoder.cols())
    throw data_error("linear autoencoder: grid does not match encoder dimension");
  return encoder * (flat(grid) - decoder.mean);
}

LinearAutoencoder train_linear_ae(const std::vector<SdfGrid>& grids, int k,
                                  const FinetuneConfig& cfg, std::uint64_t seed,
                                  bool finetune_with_sdf_loss) {
  if (grids.size() < 2) throw data_error("train_linear_ae: need at least 2 grids");
  if (k < 1) throw config_error("train_linear_ae: k must be >= 1");
  for (const SdfGrid& g : grids)
    if (!g.same_layout(grids.front()))
      throw data_error("train_linear_ae: inconsistent grid layouts");

  const Eigen::Index d = static_cast<Eigen::Index>(grids.front().values.size());
  const std::size_t n_shapes = grids.size();

  LinearAutoencoder ae;
  ae.decoder.grid_resolution = grids.front().resolution;
  ae.decoder.sample_count = static_cast<std::int64_t>(n_shapes);
  ae.decoder.mean = Eigen::VectorXd::Zero(d);
  ae.decoder.eigenvalues = Eigen::VectorXd::Zero(k);
  ae.decoder.components.resize(k, d);
  ae.encoder.resize(k, d);

  Rng rng(seed);
  double enc_scale = 1.0 / std::sqrt(static_cast<double>(d));
  double dec_scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < d; ++c) ae.encoder(r, c) = enc_scale * rng.normal();
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < d; ++c) ae.decoder.components(r, c) = dec_scale * rng.normal();

  AdamState adam_enc, adam_dec, adam_bias;
  adam_enc.init(k, d);
  adam_dec.init(k, d);
  adam_bias.init(d, 1);

  std::vector<std::size_t> order(n_shapes);
  std::iota(order.begin(), order.end(), std::size_t{0});

  Eigen::MatrixXd& enc = ae.encoder;
  Eigen::MatrixXd& dec = ae.decoder.components;
  Eigen::VectorXd& bias = ae.decoder.mean;

  long t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double lr = cfg.lr.at(epoch);
    EpochStats stats;
    stats.epoch = epoch;

    for (std::size_t start = 0; start < n_shapes; start += cfg.batch) {
      std::size_t stop = std::min(n_shapes, start + cfg.batch);
      double inv_batch = 1.0 / static_cast<double>(stop - start);

      Eigen::MatrixXd grad_enc = Eigen::MatrixXd::Zero(k, d);
      Eigen::MatrixXd grad_dec = Eigen::MatrixXd::Zero(k, d);
      Eigen::VectorXd grad_bias = Eigen::VectorXd::Zero(d);

      for (std::size_t b = start; b < stop; ++b) {
        Eigen::Map<const Eigen::VectorXd> phi(grids[order[b]].values.data(), d);
        Eigen::VectorXd centered = phi - bias;
        Eigen::VectorXd code = enc * centered;
        Eigen::VectorXd recon = dec.transpose() * code + bias;
        Eigen::VectorXd residual = recon - phi;

        double loss = residual.squaredNorm() / static_cast<double>(d);
        if (!std::isfinite(loss) || loss > cfg.abort_threshold)
          diverged(epoch, start / cfg.batch, loss);
        stats.mean_loss += loss;

        Eigen::VectorXd r = (2.0 / static_cast<double>(d)) * residual;
        Eigen::VectorXd dr = dec * r;  // dL/dcode
        grad_dec.noalias() += inv_batch * code * r.transpose();
        grad_enc.noalias() += inv_batch * dr * centered.transpose();
        grad_bias += inv_batch * (r - enc.transpose() * dr);
      }

      ++t;
      adam_enc.step(enc, grad_enc, cfg.adam, lr, t);
      adam_dec.step(dec, grad_dec, cfg.adam, lr, t);
      adam_bias.step(bias, grad_bias, cfg.adam, lr, t);
    }

    stats.mean_loss /= static_cast<double>(n_shapes);
    ae.history.push_back(stats);
  }

  if (finetune_with_sdf_loss) {
    std::vector<LatentCode> codes;
    codes.reserve(n_shapes);
    for (const SdfGrid& g : grids) codes.push_back(ae.encode(g));
    FinetuneResult ft = finetune(ae.decoder, codes, grids, cfg, seed ^ 0x66696e65ULL);
    ae.decoder = ft.basis;
    for (const EpochStats& s : ft.history) ae.history.push_back(s);
  }
  return ae;
}

}  // namespace esdf
