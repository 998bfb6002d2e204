// SPDX-License-Identifier: Apache-2.0
//
// Per-sample OOD scores for the 11 supported methods. Higher score means
// more in-distribution. All scores are computed in f64 and are finite for
// any validated bundle; degenerate inputs (zero-norm features, empty
// residuals) map to defined finite values per operation. Scoring is pure
// per sample and parallelises over samples with order-preserving output.
#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "oodeval/bundle.hpp"
#include "oodeval/fitstats.hpp"

namespace oodeval {

enum class Method {
  msp,
  maxlogit,
  energy,
  klmatching,
  maha,
  rmaha,
  react,
  vim,
  knn,
  cosine,
  rcos,
};

const std::vector<Method>& all_methods();
const char* method_name(Method m);
Method method_from_name(const std::string& name);  // DataError on unknown id
bool method_needs_features(Method m);

/// max_c softmax(o)_c
Eigen::VectorXd score_msp(const Eigen::MatrixXd& logits);

/// max_c o_c
Eigen::VectorXd score_maxlogit(const Eigen::MatrixXd& logits);

/// log sum_c exp(o_c)
Eigen::VectorXd score_energy(const Eigen::MatrixXd& logits);

/// -min_c KL[softmax(o) || d_c] over the present reference classes.
/// p_k = 0 terms contribute 0; d_ck = 0 with p_k > 0 makes class c +inf;
/// all classes +inf raises NumericError.
Eigen::VectorXd score_kl_matching(const Eigen::MatrixXd& logits,
                                  const KlRefs& refs);

/// -min_c (h - mu_c)^T Sigma^- (h - mu_c)
Eigen::VectorXd score_mahalanobis(const Eigen::MatrixXd& features,
                                  const Eigen::MatrixXd& class_means,
                                  const Eigen::MatrixXd& shared_cov_pinv);

/// -min_c [ class Mahalanobis - global Mahalanobis ]
Eigen::VectorXd score_rel_mahalanobis(const Eigen::MatrixXd& features,
                                      const FittedState& state);

/// Clamp feature entries to <= r, recompute logits with W,b, return energy.
Eigen::VectorXd score_react_energy(const Eigen::MatrixXd& features,
                                   const Eigen::MatrixXd& weights,
                                   const Eigen::VectorXd& bias, double react_r);

/// Virtual-logit probability: -exp(o0)/(sum_c exp(o_c) + exp(o0)) with
/// o0 = alpha * ||residual||; always in (-1, 0).
Eigen::VectorXd score_vim(const Eigen::MatrixXd& features,
                          const Eigen::MatrixXd& logits, const VimState& vim);

/// -(k-th smallest Euclidean distance from z = h/||h|| to the index rows);
/// exact, no approximate search.
Eigen::VectorXd score_knn(const Eigen::MatrixXd& features,
                          const KnnIndex& index);

/// max_c cos(concept_c, h); zero-norm h or concept gives similarity 0.
Eigen::VectorXd score_cosine(const Eigen::MatrixXd& features,
                             const Eigen::MatrixXd& concept_vectors);

/// max_c softmax over classes of the cosine similarities (temperature 1).
Eigen::VectorXd score_rcos_mcm(const Eigen::MatrixXd& features,
                               const Eigen::MatrixXd& concept_vectors);

/// Dispatch on method id; raises DataError when the set lacks features a
/// feature-based method needs. Output order equals input order.
Eigen::VectorXd score_method(Method m, const SetData& set,
                             const FittedState& state);

}  // namespace oodeval
