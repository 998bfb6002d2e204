// SPDX-License-Identifier: Apache-2.0
//
// Manifest-driven evaluation bundle. The manifest is a JSON document whose
// values are matrix-file paths relative to the manifest itself:
//
//   {
//     "id_train": {"features": ..., "logits": ..., "labels": ...},
//     "id_test":  {"features": ..., "logits": ...},
//     "ood":      {"<class name>": {"features": ..., "logits": ...}, ...},
//     "last_layer": {"weights": ..., "bias": ...}
//   }
//
// "features" is optional for id_test and ood entries (logits-only sets);
// feature-based detectors then refuse those sets. Everything else is
// required. OOD sets iterate in lexical key order.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace oodeval {

struct SetData {
  Eigen::MatrixXd features;  // n x d; 0x0 when absent
  Eigen::MatrixXd logits;    // n x C
  bool has_features = false;

  Eigen::Index size() const { return logits.rows(); }
};

struct EvalBundle {
  Eigen::MatrixXd train_features;  // N_tr x d
  Eigen::MatrixXd train_logits;    // N_tr x C
  std::vector<uint32_t> train_labels;
  SetData id_test;
  std::vector<std::pair<std::string, SetData>> ood_sets;  // lexical order
  Eigen::MatrixXd weights;  // d x C
  Eigen::VectorXd bias;     // C

  Eigen::Index feature_dim() const { return train_features.cols(); }
  Eigen::Index num_classes() const { return train_logits.cols(); }

  const SetData* find_ood(const std::string& name) const;
};

/// Loads and fully validates a bundle. Checks: shared feature/logit widths,
/// labels in [0, C), non-empty OOD sets, and that W,b reproduce the stored
/// train logits within relative tolerance 1e-4 on the max-abs logit
/// (reported with the worst sample index on failure).
EvalBundle load_bundle(const std::string& manifest_path);

/// Reserved OOD-set name prefix that routes a set into the unit-test
/// pass/fail block instead of the per-class aggregates.
inline constexpr const char* kUnitTestPrefix = "unittest/";

}  // namespace oodeval
