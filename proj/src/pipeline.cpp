// SPDX-License-Identifier: Apache-2.0
#include "oodeval/pipeline.hpp"

#include <cstring>

#include "oodeval/errors.hpp"

namespace oodeval {

namespace {

bool is_unit_test_set(const std::string& name) {
  return name.rfind(kUnitTestPrefix, 0) == 0;
}

}  // namespace

bool method_applicable(Method m, const EvalBundle& bundle) {
  if (!method_needs_features(m)) return true;
  if (!bundle.id_test.has_features) return false;
  for (const auto& [name, set] : bundle.ood_sets)
    if (!set.has_features) return false;
  return true;
}

std::vector<EvalReport> run_eval(const EvalBundle& bundle,
                                 const FittedState& state,
                                 const EvalConfig& config) {
  std::vector<EvalReport> reports;
  for (Method m : config.methods) {
    if (!config.methods_explicit && !method_applicable(m, bundle)) continue;

    const Eigen::VectorXd id_scores = score_method(m, bundle.id_test, state);
    std::vector<std::pair<std::string, Eigen::VectorXd>> natural;
    std::vector<std::pair<std::string, Eigen::VectorXd>> unit_sets;
    for (const auto& [name, set] : bundle.ood_sets) {
      Eigen::VectorXd scores = score_method(m, set, state);
      if (is_unit_test_set(name))
        unit_sets.emplace_back(name.substr(std::strlen(kUnitTestPrefix)),
                               std::move(scores));
      else
        natural.emplace_back(name, std::move(scores));
    }

    EvalReport report =
        per_class_report(method_name(m), id_scores, natural, config.tpr_q);
    if (!unit_sets.empty()) {
      UnitTestBlock block;
      block.fail_threshold = config.unit_fail_threshold;
      for (const auto& [name, scores] : unit_sets)
        block.per_test_fpr[name] =
            fpr_at_threshold(scores, report.threshold_tau);
      block.failed =
          count_failed_unit_tests(block.per_test_fpr, block.fail_threshold);
      report.unit_tests = std::move(block);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace oodeval
