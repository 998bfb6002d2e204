// SPDX-License-Identifier: Apache-2.0
#include "oodeval/fitstats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "oodeval/errors.hpp"
#include "oodeval/numerics.hpp"

namespace oodeval {

Eigen::MatrixXd fit_class_means(const Eigen::MatrixXd& features,
                                const std::vector<uint32_t>& labels,
                                Eigen::Index num_classes) {
  std::vector<std::vector<std::size_t>> members(
      static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i)
    members[labels[i]].push_back(i);

  Eigen::MatrixXd means(num_classes, features.cols());
  for (Eigen::Index c = 0; c < num_classes; ++c) {
    const auto& rows = members[static_cast<std::size_t>(c)];
    if (rows.empty())
      throw DataError("fit_class_means: class " + std::to_string(c) +
                      " has no samples");
    means.row(c) =
        (pairwise_row_sum(features, rows) / static_cast<double>(rows.size()))
            .transpose();
  }
  return means;
}

Eigen::MatrixXd shared_covariance(const Eigen::MatrixXd& features,
                                  const std::vector<uint32_t>& labels,
                                  const Eigen::MatrixXd& class_means) {
  const Eigen::Index n = features.rows();
  Eigen::MatrixXd centered(n, features.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    centered.row(i) =
        features.row(i) - class_means.row(labels[static_cast<std::size_t>(i)]);
  return centered.transpose() * centered / static_cast<double>(n);
}

Eigen::MatrixXd sym_pseudo_inverse(const Eigen::MatrixXd& m, double eps) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double lambda_max = lambda.maxCoeff();
  if (!(lambda_max > 0.0))
    return Eigen::MatrixXd::Zero(m.rows(), m.cols());

  const double cutoff = eps * lambda_max;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) >= cutoff) inv(i) = 1.0 / lambda(i);

  Eigen::MatrixXd pinv =
      es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (pinv + pinv.transpose());
}

Eigen::MatrixXd fit_shared_covariance(const Eigen::MatrixXd& features,
                                      const std::vector<uint32_t>& labels,
                                      const Eigen::MatrixXd& class_means) {
  return sym_pseudo_inverse(shared_covariance(features, labels, class_means));
}

void fit_global_gaussian(const Eigen::MatrixXd& features,
                         Eigen::VectorXd& global_mean,
                         Eigen::MatrixXd& global_cov_pinv) {
  const Eigen::Index n = features.rows();
  std::vector<std::size_t> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  global_mean = pairwise_row_sum(features, all) / static_cast<double>(n);

  const Eigen::MatrixXd centered =
      features.rowwise() - global_mean.transpose();
  global_cov_pinv =
      sym_pseudo_inverse(centered.transpose() * centered / static_cast<double>(n));
}

Eigen::Index vim_principal_dim(Eigen::Index d) {
  if (d >= 2048) return 1000;
  if (d >= 768) return 512;
  return (d + 1) / 2;  // round half up
}

VimState fit_vim(const Eigen::MatrixXd& features, const Eigen::MatrixXd& logits,
                 const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  const Eigen::Index principal_dim = vim_principal_dim(d);
  if (n < principal_dim)
    throw DataError("fit_vim: need at least " + std::to_string(principal_dim) +
                    " train samples for D=" + std::to_string(principal_dim));

  VimState vim;
  vim.offset_u =
      -(Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(
            weights.transpose())
            .pseudoInverse() *
        bias);

  const Eigen::MatrixXd offset_features =
      features.rowwise() - vim.offset_u.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      offset_features.transpose() * offset_features);

  // descending eigenvalue; ties keep ascending original index
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return es.eigenvalues()(a) > es.eigenvalues()(b);
                   });
  vim.principal_basis.resize(d, principal_dim);
  for (Eigen::Index j = 0; j < principal_dim; ++j)
    vim.principal_basis.col(j) =
        es.eigenvectors().col(order[static_cast<std::size_t>(j)]);

  std::vector<double> max_logits(static_cast<std::size_t>(n));
  std::vector<double> residual_norms(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    max_logits[static_cast<std::size_t>(i)] = logits.row(i).maxCoeff();
    const Eigen::VectorXd h = offset_features.row(i).transpose();
    const Eigen::VectorXd residual =
        h - vim.principal_basis * (vim.principal_basis.transpose() * h);
    residual_norms[static_cast<std::size_t>(i)] = residual.norm();
  }
  const double residual_sum = pairwise_sum(residual_norms);
  if (residual_sum == 0.0)
    throw NumericError("fit_vim: degenerate residual space (alpha undefined)");
  vim.alpha = pairwise_sum(max_logits) / residual_sum;
  return vim;
}

double fit_react_threshold(const Eigen::MatrixXd& features) {
  std::vector<double> entries(features.data(),
                              features.data() + features.size());
  std::sort(entries.begin(), entries.end());
  return quantile_sorted(entries, 0.99);
}

KlRefs fit_kl_refs(const Eigen::MatrixXd& train_logits, KlGrouping grouping,
                   const std::vector<uint32_t>& labels,
                   Eigen::Index num_classes) {
  const Eigen::Index n = train_logits.rows();
  Eigen::MatrixXd probs(n, train_logits.cols());
  std::vector<std::vector<std::size_t>> groups(
      static_cast<std::size_t>(num_classes));
  for (Eigen::Index i = 0; i < n; ++i) {
    probs.row(i) = softmax(train_logits.row(i).transpose()).transpose();
    std::size_t group;
    if (grouping == KlGrouping::predicted) {
      Eigen::Index argmax = 0;
      train_logits.row(i).maxCoeff(&argmax);  // ties resolve to lowest index
      group = static_cast<std::size_t>(argmax);
    } else {
      group = labels[static_cast<std::size_t>(i)];
    }
    groups[group].push_back(static_cast<std::size_t>(i));
  }

  KlRefs out;
  std::vector<Eigen::VectorXd> rows;
  for (Eigen::Index c = 0; c < num_classes; ++c) {
    const auto& members = groups[static_cast<std::size_t>(c)];
    if (members.empty()) continue;
    rows.push_back(pairwise_row_sum(probs, members) /
                   static_cast<double>(members.size()));
    out.class_index.push_back(static_cast<uint32_t>(c));
  }
  out.refs.resize(static_cast<Eigen::Index>(rows.size()), train_logits.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.refs.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return out;
}

KnnIndex build_knn_index(const Eigen::MatrixXd& features, int k_requested) {
  KnnIndex index;
  index.normalized.resize(features.rows(), features.cols());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const double norm = features.row(i).norm();
    if (norm > 0.0)
      index.normalized.row(i) = features.row(i) / norm;
    else
      index.normalized.row(i).setZero();
  }
  index.k = static_cast<int>(
      std::min<Eigen::Index>(k_requested, features.rows()));
  return index;
}

FittedState fit_detectors(const EvalBundle& bundle, const FitOptions& options) {
  FittedState state;
  const Eigen::Index C = bundle.num_classes();
  state.class_means =
      fit_class_means(bundle.train_features, bundle.train_labels, C);
  state.shared_cov_pinv = fit_shared_covariance(
      bundle.train_features, bundle.train_labels, state.class_means);
  fit_global_gaussian(bundle.train_features, state.global_mean,
                      state.global_cov_pinv);
  state.vim = fit_vim(bundle.train_features, bundle.train_logits,
                      bundle.weights, bundle.bias);
  state.react_r = fit_react_threshold(bundle.train_features);
  state.kl_refs = fit_kl_refs(bundle.train_logits, options.kl_grouping,
                              bundle.train_labels, C);
  state.knn = build_knn_index(bundle.train_features, options.knn_k);
  state.weights = bundle.weights;
  state.bias = bundle.bias;
  state.kl_grouping = options.kl_grouping;
  return state;
}

// --- serialization ---

namespace {

constexpr char kStateMagic[4] = {'O', 'O', 'D', 'S'};
constexpr uint16_t kStateVersion = 1;

void put_u64(std::ofstream& out, uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

void put_f64(std::ofstream& out, double v) {
  put_u64(out, std::bit_cast<uint64_t>(v));
}

void put_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  put_u64(out, static_cast<uint64_t>(m.rows()));
  put_u64(out, static_cast<uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

uint64_t get_u64(std::ifstream& in) {
  uint8_t bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw DataError("fitted state: truncated file");
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

double get_f64(std::ifstream& in) { return std::bit_cast<double>(get_u64(in)); }

Eigen::MatrixXd get_matrix(std::ifstream& in) {
  const auto rows = static_cast<Eigen::Index>(get_u64(in));
  const auto cols = static_cast<Eigen::Index>(get_u64(in));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get_f64(in);
  return m;
}

}  // namespace

void save_fitted_state(const std::string& path, const FittedState& state) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("fitted state: cannot open " + path);
  out.write(kStateMagic, 4);
  const char version[2] = {static_cast<char>(kStateVersion & 0xff),
                           static_cast<char>(kStateVersion >> 8)};
  out.write(version, 2);
  out.put(static_cast<char>(state.kl_grouping));
  out.put(0);  // pad

  put_matrix(out, state.class_means);
  put_matrix(out, state.shared_cov_pinv);
  put_matrix(out, state.global_mean);
  put_matrix(out, state.global_cov_pinv);
  put_matrix(out, state.vim.offset_u);
  put_matrix(out, state.vim.principal_basis);
  put_f64(out, state.vim.alpha);
  put_f64(out, state.react_r);
  put_matrix(out, state.kl_refs.refs);
  put_u64(out, state.kl_refs.class_index.size());
  for (uint32_t c : state.kl_refs.class_index) put_u64(out, c);
  put_matrix(out, state.knn.normalized);
  put_u64(out, static_cast<uint64_t>(state.knn.k));
  put_matrix(out, state.weights);
  put_matrix(out, state.bias);
  if (!out) throw DataError("fitted state: write failed for " + path);
}

FittedState load_fitted_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("fitted state: cannot open " + path);
  char header[8];
  in.read(header, 8);
  if (!in || std::memcmp(header, kStateMagic, 4) != 0)
    throw DataError("fitted state: bad magic in " + path);
  const uint16_t version = static_cast<uint8_t>(header[4]) |
                           (static_cast<uint8_t>(header[5]) << 8);
  if (version != kStateVersion)
    throw DataError("fitted state: unsupported version in " + path);

  FittedState state;
  state.kl_grouping = static_cast<KlGrouping>(header[6]);
  state.class_means = get_matrix(in);
  state.shared_cov_pinv = get_matrix(in);
  state.global_mean = get_matrix(in);
  state.global_cov_pinv = get_matrix(in);
  state.vim.offset_u = get_matrix(in);
  state.vim.principal_basis = get_matrix(in);
  state.vim.alpha = get_f64(in);
  state.react_r = get_f64(in);
  state.kl_refs.refs = get_matrix(in);
  const uint64_t n_refs = get_u64(in);
  state.kl_refs.class_index.resize(n_refs);
  for (uint64_t i = 0; i < n_refs; ++i)
    state.kl_refs.class_index[i] = static_cast<uint32_t>(get_u64(in));
  state.knn.normalized = get_matrix(in);
  state.knn.k = static_cast<int>(get_u64(in));
  state.weights = get_matrix(in);
  state.bias = get_matrix(in);
  return state;
}

}  // namespace oodeval
