// SPDX-License-Identifier: Apache-2.0
//
// Train-set statistics behind the detectors: per-class and global Gaussians
// (covariances inverted through a symmetric-eigendecomposition
// pseudo-inverse), the ViM principal space with its virtual-logit scale
// alpha, the ReAct activation-truncation threshold, KL-Matching reference
// probability vectors and the normalized KNN index. All fitting is serial
// with fixed pairwise reductions, so results are reproducible bit-for-bit.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "oodeval/bundle.hpp"

namespace oodeval {

struct VimState {
  Eigen::VectorXd offset_u;         // d
  Eigen::MatrixXd principal_basis;  // d x D, orthonormal columns
  double alpha = 0.0;

  Eigen::Index principal_dim() const { return principal_basis.cols(); }
};

struct KlRefs {
  Eigen::MatrixXd refs;  // K_present x C, rows on the probability simplex
  std::vector<uint32_t> class_index;  // class id of each row
};

struct KnnIndex {
  Eigen::MatrixXd normalized;  // N_tr x d, unit (or zero) rows
  int k = 0;
};

enum class KlGrouping : uint8_t { predicted = 0, true_label = 1 };

struct FitOptions {
  int knn_k = 1000;
  KlGrouping kl_grouping = KlGrouping::predicted;
};

struct FittedState {
  Eigen::MatrixXd class_means;      // C x d
  Eigen::MatrixXd shared_cov_pinv;  // d x d, symmetric
  Eigen::VectorXd global_mean;      // d
  Eigen::MatrixXd global_cov_pinv;  // d x d, symmetric
  VimState vim;
  double react_r = 0.0;
  KlRefs kl_refs;
  KnnIndex knn;
  Eigen::MatrixXd weights;  // d x C copy
  Eigen::VectorXd bias;     // C copy
  KlGrouping kl_grouping = KlGrouping::predicted;
};

// --- individual fitting operations ---

/// Row c = arithmetic mean of features with label c. Every class in [0, C)
/// must have at least one sample; an empty class raises DataError naming it.
Eigen::MatrixXd fit_class_means(const Eigen::MatrixXd& features,
                                const std::vector<uint32_t>& labels,
                                Eigen::Index num_classes);

/// Shared covariance with divisor N over class-mean-centered rows.
Eigen::MatrixXd shared_covariance(const Eigen::MatrixXd& features,
                                  const std::vector<uint32_t>& labels,
                                  const Eigen::MatrixXd& class_means);

/// Pseudo-inverse of a symmetric PSD matrix via eigendecomposition.
/// Eigenvalues below eps * max eigenvalue are treated as exactly zero;
/// an all-zero (or negative-semidefinite) input yields the zero matrix.
Eigen::MatrixXd sym_pseudo_inverse(const Eigen::MatrixXd& m,
                                   double eps = 1e-10);

Eigen::MatrixXd fit_shared_covariance(const Eigen::MatrixXd& features,
                                      const std::vector<uint32_t>& labels,
                                      const Eigen::MatrixXd& class_means);

void fit_global_gaussian(const Eigen::MatrixXd& features,
                         Eigen::VectorXd& global_mean,
                         Eigen::MatrixXd& global_cov_pinv);

/// Principal-space dimensionality rule: D=1000 for d>=2048, D=512 for
/// 768<=d<2048, else round(d/2) with halves rounded up.
Eigen::Index vim_principal_dim(Eigen::Index d);

/// Fits the ViM offset u = -(W^T)^+ b, the D leading eigenvectors of
/// F^T F over offset train features (descending eigenvalue, ties by
/// ascending original index), and the virtual-logit scale
/// alpha = sum_i max_c o_i^c / sum_i ||residual_i||. Raises NumericError
/// "degenerate residual space" when every train residual is zero.
VimState fit_vim(const Eigen::MatrixXd& features, const Eigen::MatrixXd& logits,
                 const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias);

/// Empirical 99th percentile of all flattened train-feature entries
/// (linear-interpolation quantile), so 1% of activations get truncated.
double fit_react_threshold(const Eigen::MatrixXd& features);

/// Mean softmax vector per group; groups by predicted class (argmax, ties
/// to the lowest index) or by true label. Empty groups are excluded; the
/// class ids of the surviving rows are recorded in class_index.
KlRefs fit_kl_refs(const Eigen::MatrixXd& train_logits, KlGrouping grouping,
                   const std::vector<uint32_t>& labels,
                   Eigen::Index num_classes);

/// Row-normalized train features (zero-norm rows stay zero vectors);
/// k = min(k_requested, N_tr).
KnnIndex build_knn_index(const Eigen::MatrixXd& features, int k_requested);

/// Fits everything from a validated bundle.
FittedState fit_detectors(const EvalBundle& bundle,
                          const FitOptions& options = {});

// --- serialization (versioned binary; exact f64 round-trip) ---

void save_fitted_state(const std::string& path, const FittedState& state);
FittedState load_fitted_state(const std::string& path);

}  // namespace oodeval
