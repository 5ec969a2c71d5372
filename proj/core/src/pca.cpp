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

#include "esdf/pca.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cstring>
#include <fstream>

#include "esdf/errors.hpp"

namespace esdf {

double EigenBasis::orthonormality_error() const {
  Eigen::MatrixXd gram = components * components.transpose();
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

namespace {

Eigen::Map<const Eigen::VectorXd> flat(const SdfGrid& grid) {
  return {grid.values.data(), static_cast<Eigen::Index>(grid.values.size())};
}

// Running state of the incremental fit: U diag(s)^2 U^T approximates the
// scatter matrix of everything seen so far.
struct FitState {
  Eigen::MatrixXd basis_u;   // d x r, orthonormal columns
  Eigen::VectorXd singular;  // r
  Eigen::VectorXd mean;      // d
  std::int64_t count = 0;
  SdfGrid layout;            // metadata of the first grid
};

void merge_batch(FitState& state, const Eigen::MatrixXd& batch, const PcaOptions& options) {
  const auto m = batch.cols();
  Eigen::VectorXd batch_mean =
      options.center ? Eigen::VectorXd(batch.rowwise().mean())
                     : Eigen::VectorXd(Eigen::VectorXd::Zero(batch.rows()));

  Eigen::Index r = state.basis_u.cols();
  Eigen::Index extra = state.count > 0 && options.center ? 1 : 0;
  Eigen::MatrixXd merged(batch.rows(), r + m + extra);
  if (r > 0) merged.leftCols(r) = state.basis_u * state.singular.asDiagonal();
  merged.middleCols(r, m) = batch.colwise() - batch_mean;
  if (extra) {
    // scatter of A union B = scatter A + scatter B + nm/(n+m) shift shift^T
    double w = std::sqrt(static_cast<double>(state.count) * static_cast<double>(m) /
                         static_cast<double>(state.count + m));
    merged.rightCols(1) = w * (batch_mean - state.mean);
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(merged, Eigen::ComputeThinU);
  Eigen::Index keep = std::min<Eigen::Index>(options.k_max, svd.matrixU().cols());
  state.basis_u = svd.matrixU().leftCols(keep);
  state.singular = svd.singularValues().head(keep);

  if (options.center) {
    double n = static_cast<double>(state.count), mm = static_cast<double>(m);
    state.mean = state.count == 0
                     ? batch_mean
                     : Eigen::VectorXd((n * state.mean + mm * batch_mean) / (n + mm));
  }
  state.count += m;
}

EigenBasis finalize(FitState& state, const PcaOptions& options) {
  if (state.count < 2) throw data_error("fit_incremental: need at least 2 grids");
  if (options.k_max > state.count)
    throw config_error("fit_incremental: k_max (" + std::to_string(options.k_max) +
                       ") exceeds the number of samples (" + std::to_string(state.count) +
                       ")");

  EigenBasis basis;
  basis.grid_resolution = state.layout.resolution;
  basis.sample_count = state.count;
  basis.mean = options.center ? state.mean : Eigen::VectorXd::Zero(state.basis_u.rows());

  Eigen::Index k = std::min<Eigen::Index>(options.k_max, state.basis_u.cols());
  basis.components = state.basis_u.leftCols(k).transpose();
  basis.eigenvalues =
      state.singular.head(k).array().square() / static_cast<double>(state.count);
  return basis;
}

}  // namespace

EigenBasis fit_incremental(const GridStream& stream, const PcaOptions& options) {
  if (options.k_max < 1) throw config_error("fit_incremental: k_max must be >= 1");
  if (options.batch_size < options.k_max)
    throw config_error("fit_incremental: batch_size must be >= k_max");

  FitState state;
  Eigen::MatrixXd batch;
  Eigen::Index filled = 0;
  bool first = true;

  for (;;) {
    std::optional<SdfGrid> next = stream();
    if (next) {
      if (first) {
        state.layout = *next;
        state.layout.values.clear();
        state.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(next->values.size()));
        batch.resize(state.mean.size(), options.batch_size);
        first = false;
      } else if (!next->same_layout(state.layout)) {
        throw data_error("fit_incremental: inconsistent grid resolutions in stream");
      }
      batch.col(filled++) = flat(*next);
      if (filled < options.batch_size) continue;
    }
    if (filled > 0) {
      merge_batch(state, batch.leftCols(filled), options);
      filled = 0;
    }
    if (!next) break;
  }
  return finalize(state, options);
}

EigenBasis fit_incremental(const std::vector<SdfGrid>& grids, const PcaOptions& options) {
  std::size_t i = 0;
  return fit_incremental(
      [&]() -> std::optional<SdfGrid> {
        if (i >= grids.size()) return std::nullopt;
        return grids[i++];
      },
      options);
}

int select_k(const Eigen::VectorXd& eigenvalues, double variance_target) {
  if (eigenvalues.size() == 0) throw config_error("select_k: empty spectrum");
  if (variance_target <= 0.0 || variance_target > 1.0)
    throw config_error("select_k: variance target must be in (0, 1]");
  double total = eigenvalues.sum();
  if (total <= 0.0) throw numeric_error("select_k: all-zero spectrum");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    acc += eigenvalues[i];
    if (acc / total >= variance_target) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(eigenvalues.size());
}

EigenBasis truncate_basis(const EigenBasis& basis, int k) {
  if (k < 1 || k > basis.k())
    throw config_error("truncate_basis: k out of range");
  EigenBasis out = basis;
  out.components = basis.components.topRows(k);
  out.eigenvalues = basis.eigenvalues.head(k);
  return out;
}

LatentCode encode(const SdfGrid& grid, const EigenBasis& basis) {
  if (static_cast<std::int64_t>(grid.values.size()) != basis.dim())
    throw data_error("encode: grid does not match basis dimension");
  return basis.components * (flat(grid) - basis.mean);
}

SdfGrid decode(const LatentCode& code, const EigenBasis& basis) {
  if (code.size() != basis.k())
    throw data_error("decode: code length does not match basis k");
  SdfGrid grid = empty_grid_for_basis(basis);
  Eigen::Map<Eigen::VectorXd> out(grid.values.data(),
                                  static_cast<Eigen::Index>(grid.values.size()));
  out = basis.mean + basis.components.transpose() * code;
  return grid;
}

SdfGrid empty_grid_for_basis(const EigenBasis& basis) {
  return SdfGrid::make(basis.grid_resolution);
}

namespace {

constexpr char kBasisMagic[4] = {'E', 'B', 'A', 'S'};
constexpr std::uint32_t kBasisVersion = 1;

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

void write_f32_vector(std::ostream& out, const Eigen::VectorXd& v) {
  std::vector<float> f32(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) f32[i] = static_cast<float>(v[i]);
  out.write(reinterpret_cast<const char*>(f32.data()),
            static_cast<std::streamsize>(f32.size() * sizeof(float)));
}

Eigen::VectorXd read_f32_vector(std::istream& in, std::size_t n) {
  std::vector<float> f32(n);
  in.read(reinterpret_cast<char*>(f32.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  Eigen::VectorXd v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f32[i];
  return v;
}

}  // namespace

void save_basis(const EigenBasis& basis, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw data_error("cannot write basis file: " + path);
    out.write(kBasisMagic, 4);
    write_raw<std::uint32_t>(out, kBasisVersion);
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(basis.k()));
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(basis.grid_resolution));
    write_raw<std::uint8_t>(out, basis.finetuned ? 1 : 0);
    write_f32_vector(out, basis.mean);
    write_f32_vector(out, basis.eigenvalues);
    for (Eigen::Index r = 0; r < basis.components.rows(); ++r)
      write_f32_vector(out, basis.components.row(r));
    if (!out) throw data_error("short write: " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw data_error("cannot finalize basis file: " + path);
}

EigenBasis load_basis(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open basis file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kBasisMagic, 4) != 0)
    throw data_error("not an EBAS basis file: " + path);
  if (read_raw<std::uint32_t>(in) != kBasisVersion)
    throw data_error("unsupported EBAS version in " + path);
  std::uint32_t k = read_raw<std::uint32_t>(in);
  std::uint32_t m = read_raw<std::uint32_t>(in);
  std::uint8_t finetuned = read_raw<std::uint8_t>(in);
  if (k < 1 || m < 1 || m > 4096) throw data_error("implausible EBAS header in " + path);

  EigenBasis basis;
  basis.grid_resolution = static_cast<int>(m);
  basis.finetuned = finetuned != 0;
  std::size_t dim = static_cast<std::size_t>(m) * m * m;
  basis.mean = read_f32_vector(in, dim);
  basis.eigenvalues = read_f32_vector(in, k);
  basis.components.resize(k, static_cast<Eigen::Index>(dim));
  for (std::uint32_t r = 0; r < k; ++r)
    basis.components.row(r) = read_f32_vector(in, dim);
  if (!in) throw data_error("truncated basis file: " + path);
  return basis;
}

}  // namespace esdf
