// SPDX-License-Identifier: Apache-2.0
#include "oodeval/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oodeval/errors.hpp"
#include "oodeval/numerics.hpp"
#include "oodeval/parallel.hpp"

namespace oodeval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Evaluate one score per row of an n-row input, in parallel.
template <typename Fn>
Eigen::VectorXd per_row(Eigen::Index n, Fn&& fn) {
  Eigen::VectorXd out(n);
  parallel_for(static_cast<std::size_t>(n),
               [&](std::size_t i) { out(static_cast<Eigen::Index>(i)) = fn(i); });
  return out;
}

}  // namespace

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {
      Method::msp,  Method::maxlogit, Method::energy, Method::klmatching,
      Method::maha, Method::rmaha,    Method::react,  Method::vim,
      Method::knn,  Method::cosine,   Method::rcos};
  return methods;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::msp: return "msp";
    case Method::maxlogit: return "maxlogit";
    case Method::energy: return "energy";
    case Method::klmatching: return "klmatching";
    case Method::maha: return "maha";
    case Method::rmaha: return "rmaha";
    case Method::react: return "react";
    case Method::vim: return "vim";
    case Method::knn: return "knn";
    case Method::cosine: return "cosine";
    case Method::rcos: return "rcos";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  for (Method m : all_methods())
    if (name == method_name(m)) return m;
  throw DataError("unknown method id '" + name + "'");
}

bool method_needs_features(Method m) {
  switch (m) {
    case Method::msp:
    case Method::maxlogit:
    case Method::energy:
    case Method::klmatching:
      return false;
    default:
      return true;
  }
}

Eigen::VectorXd score_msp(const Eigen::MatrixXd& logits) {
  return per_row(logits.rows(), [&](std::size_t i) {
    return softmax(logits.row(static_cast<Eigen::Index>(i)).transpose())
        .maxCoeff();
  });
}

Eigen::VectorXd score_maxlogit(const Eigen::MatrixXd& logits) {
  return per_row(logits.rows(), [&](std::size_t i) {
    return logits.row(static_cast<Eigen::Index>(i)).maxCoeff();
  });
}

Eigen::VectorXd score_energy(const Eigen::MatrixXd& logits) {
  return per_row(logits.rows(), [&](std::size_t i) {
    return logsumexp(logits.row(static_cast<Eigen::Index>(i)).transpose());
  });
}

Eigen::VectorXd score_kl_matching(const Eigen::MatrixXd& logits,
                                  const KlRefs& refs) {
  if (refs.refs.rows() == 0)
    throw DataError("score_kl_matching: no reference vectors");
  if (refs.refs.cols() != logits.cols())
    throw DataError("score_kl_matching: logit width mismatch");
  return per_row(logits.rows(), [&](std::size_t idx) {
    const Eigen::VectorXd p =
        softmax(logits.row(static_cast<Eigen::Index>(idx)).transpose());
    double best = kInf;
    for (Eigen::Index c = 0; c < refs.refs.rows(); ++c) {
      double kl = 0.0;
      for (Eigen::Index k = 0; k < p.size(); ++k) {
        if (p(k) <= 0.0) continue;
        if (refs.refs(c, k) <= 0.0) {
          kl = kInf;
          break;
        }
        kl += p(k) * std::log(p(k) / refs.refs(c, k));
      }
      best = std::min(best, kl);
    }
    if (!std::isfinite(best))
      throw NumericError(
          "score_kl_matching: KL divergence infinite for every reference");
    return -best;
  });
}

Eigen::VectorXd score_mahalanobis(const Eigen::MatrixXd& features,
                                  const Eigen::MatrixXd& class_means,
                                  const Eigen::MatrixXd& shared_cov_pinv) {
  if (features.cols() != class_means.cols())
    throw DataError("score_mahalanobis: feature dimension mismatch");
  return per_row(features.rows(), [&](std::size_t idx) {
    double best = kInf;
    for (Eigen::Index c = 0; c < class_means.rows(); ++c) {
      const Eigen::VectorXd diff =
          (features.row(static_cast<Eigen::Index>(idx)) - class_means.row(c))
              .transpose();
      best = std::min(best, diff.dot(shared_cov_pinv * diff));
    }
    return -best;
  });
}

Eigen::VectorXd score_rel_mahalanobis(const Eigen::MatrixXd& features,
                                      const FittedState& state) {
  if (features.cols() != state.class_means.cols())
    throw DataError("score_rel_mahalanobis: feature dimension mismatch");
  return per_row(features.rows(), [&](std::size_t idx) {
    const Eigen::VectorXd h =
        features.row(static_cast<Eigen::Index>(idx)).transpose();
    const Eigen::VectorXd global_diff = h - state.global_mean;
    const double global_dist =
        global_diff.dot(state.global_cov_pinv * global_diff);
    double best = kInf;
    for (Eigen::Index c = 0; c < state.class_means.rows(); ++c) {
      const Eigen::VectorXd diff = h - state.class_means.row(c).transpose();
      best = std::min(best,
                      diff.dot(state.shared_cov_pinv * diff) - global_dist);
    }
    return -best;
  });
}

Eigen::VectorXd score_react_energy(const Eigen::MatrixXd& features,
                                   const Eigen::MatrixXd& weights,
                                   const Eigen::VectorXd& bias,
                                   double react_r) {
  if (features.cols() != weights.rows())
    throw DataError("score_react_energy: feature dimension mismatch");
  return per_row(features.rows(), [&](std::size_t idx) {
    const Eigen::VectorXd clipped = features.row(static_cast<Eigen::Index>(idx))
                                        .transpose()
                                        .cwiseMin(react_r);
    return logsumexp(weights.transpose() * clipped + bias);
  });
}

Eigen::VectorXd score_vim(const Eigen::MatrixXd& features,
                          const Eigen::MatrixXd& logits, const VimState& vim) {
  if (features.cols() != vim.offset_u.size())
    throw DataError("score_vim: feature dimension mismatch");
  if (features.rows() != logits.rows())
    throw DataError("score_vim: features/logits row count mismatch");
  return per_row(features.rows(), [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    const Eigen::VectorXd offset = features.row(i).transpose() - vim.offset_u;
    const Eigen::VectorXd residual =
        offset - vim.principal_basis * (vim.principal_basis.transpose() * offset);
    const double virtual_logit = vim.alpha * residual.norm();

    Eigen::VectorXd extended(logits.cols() + 1);
    extended.head(logits.cols()) = logits.row(i).transpose();
    extended(logits.cols()) = virtual_logit;
    const double shift = extended.maxCoeff();
    const Eigen::VectorXd e = (extended.array() - shift).exp();
    return -e(logits.cols()) / e.sum();
  });
}

Eigen::VectorXd score_knn(const Eigen::MatrixXd& features,
                          const KnnIndex& index) {
  if (features.cols() != index.normalized.cols())
    throw DataError("score_knn: feature dimension mismatch");
  const auto n_train = static_cast<std::size_t>(index.normalized.rows());
  return per_row(features.rows(), [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    const double norm = features.row(i).norm();
    const Eigen::RowVectorXd z =
        norm > 0.0 ? Eigen::RowVectorXd(features.row(i) / norm)
                   : Eigen::RowVectorXd::Zero(features.cols());
    std::vector<double> dist(n_train);
    for (std::size_t j = 0; j < n_train; ++j)
      dist[j] = (z - index.normalized.row(static_cast<Eigen::Index>(j))).norm();
    auto kth = dist.begin() + (index.k - 1);
    std::nth_element(dist.begin(), kth, dist.end());
    return -*kth;
  });
}

Eigen::VectorXd score_cosine(const Eigen::MatrixXd& features,
                             const Eigen::MatrixXd& concept_vectors) {
  if (features.cols() != concept_vectors.cols())
    throw DataError("score_cosine: feature dimension mismatch");
  return per_row(features.rows(), [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    const double h_norm = features.row(i).norm();
    double best = -kInf;
    for (Eigen::Index c = 0; c < concept_vectors.rows(); ++c) {
      const double c_norm = concept_vectors.row(c).norm();
      const double sim =
          (h_norm > 0.0 && c_norm > 0.0)
              ? features.row(i).dot(concept_vectors.row(c)) / (h_norm * c_norm)
              : 0.0;
      best = std::max(best, sim);
    }
    return best;
  });
}

Eigen::VectorXd score_rcos_mcm(const Eigen::MatrixXd& features,
                               const Eigen::MatrixXd& concept_vectors) {
  if (features.cols() != concept_vectors.cols())
    throw DataError("score_rcos_mcm: feature dimension mismatch");
  return per_row(features.rows(), [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    const double h_norm = features.row(i).norm();
    Eigen::VectorXd sims(concept_vectors.rows());
    for (Eigen::Index c = 0; c < concept_vectors.rows(); ++c) {
      const double c_norm = concept_vectors.row(c).norm();
      sims(c) =
          (h_norm > 0.0 && c_norm > 0.0)
              ? features.row(i).dot(concept_vectors.row(c)) / (h_norm * c_norm)
              : 0.0;
    }
    return softmax(sims).maxCoeff();
  });
}

Eigen::VectorXd score_method(Method m, const SetData& set,
                             const FittedState& state) {
  if (method_needs_features(m) && !set.has_features)
    throw DataError(std::string("method '") + method_name(m) +
                    "' requires features but the set is logits-only");
  switch (m) {
    case Method::msp: return score_msp(set.logits);
    case Method::maxlogit: return score_maxlogit(set.logits);
    case Method::energy: return score_energy(set.logits);
    case Method::klmatching: return score_kl_matching(set.logits, state.kl_refs);
    case Method::maha:
      return score_mahalanobis(set.features, state.class_means,
                               state.shared_cov_pinv);
    case Method::rmaha: return score_rel_mahalanobis(set.features, state);
    case Method::react:
      return score_react_energy(set.features, state.weights, state.bias,
                                state.react_r);
    case Method::vim: return score_vim(set.features, set.logits, state.vim);
    case Method::knn: return score_knn(set.features, state.knn);
    case Method::cosine: return score_cosine(set.features, state.class_means);
    case Method::rcos: return score_rcos_mcm(set.features, state.class_means);
  }
  throw DataError("unreachable method id");
}

}  // namespace oodeval
