// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "oodeval/bundle.hpp"
#include "oodeval/detectors.hpp"
#include "oodeval/fitstats.hpp"
#include "oodeval/metrics.hpp"

namespace oodeval {

struct EvalConfig {
  std::vector<Method> methods;  // evaluated in this order
  bool methods_explicit = false;  // false: silently skip inapplicable ones
  double tpr_q = 0.95;
  double unit_fail_threshold = 0.10;
};

/// True when every set the method must score carries features.
bool method_applicable(Method m, const EvalBundle& bundle);

/// Scores id_test and every OOD set per method, derives one tau per method
/// from the ID-test scores, and assembles reports. OOD sets named with the
/// "unittest/" prefix feed the pass/fail block instead of the per-class
/// aggregates. Output order follows config.methods.
std::vector<EvalReport> run_eval(const EvalBundle& bundle,
                                 const FittedState& state,
                                 const EvalConfig& config);

}  // namespace oodeval
