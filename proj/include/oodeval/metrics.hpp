// SPDX-License-Identifier: Apache-2.0
//
// Evaluation numbers: FPR at a fixed TPR, AUROC (ties counted half, exact
// pair semantics via rank statistics), AUPR as average precision with
// tie-blocks processed as one step, per-OOD-class reports with uniform
// means and the FPR CDF over classes, and the unit-test pass/fail rule.
#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oodeval {

struct ClassMetrics {
  std::string class_name;
  std::size_t n = 0;
  double fpr_at_tpr = 0.0;
  double auroc = 0.0;
  double aupr_s = 0.0;  // ID positive
  double aupr_e = 0.0;  // OOD positive
};

struct UnitTestBlock {
  std::map<std::string, double> per_test_fpr;  // suite name -> FPR
  double fail_threshold = 0.10;
  int failed = 0;
};

struct EvalReport {
  std::string method;
  double tpr_q = 0.95;
  double threshold_tau = 0.0;
  std::vector<ClassMetrics> per_class;
  double mean_fpr = 0.0;
  double mean_auroc = 0.0;
  double mean_aupr_s = 0.0;
  double mean_aupr_e = 0.0;
  // right-continuous step CDF of per-class FPR values, one point per
  // distinct FPR: (fpr value, fraction of classes with FPR <= value)
  std::vector<std::pair<double, double>> cdf_points;
  std::optional<UnitTestBlock> unit_tests;
};

/// tau = the ceil(q*N)-th largest ID score, so at least fraction q of ID
/// scores are >= tau. q in (0, 1]; deterministic under ties.
double threshold_at_tpr(const Eigen::VectorXd& id_scores, double q);

/// Fraction of OOD scores >= tau.
double fpr_at_threshold(const Eigen::VectorXd& ood_scores, double tau);

double fpr_at_tpr(const Eigen::VectorXd& id_scores,
                  const Eigen::VectorXd& ood_scores, double q = 0.95);

/// Probability that a random ID score exceeds a random OOD score, equal
/// scores counted half. Matches O(N^2) pair counting exactly.
double auroc(const Eigen::VectorXd& id_scores,
             const Eigen::VectorXd& ood_scores);

enum class PositiveClass { id, ood };

/// Average precision: sum_k (R_k - R_{k-1}) * P_k over descending-score
/// tie blocks. PositiveClass::ood ranks by negated scores.
double aupr(const Eigen::VectorXd& id_scores, const Eigen::VectorXd& ood_scores,
            PositiveClass positive);

/// One ClassMetrics per OOD set against a single ID-derived tau; uniform
/// means over classes; CDF points over the per-class FPR values.
EvalReport per_class_report(
    const std::string& method, const Eigen::VectorXd& id_scores,
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& ood_scores,
    double q);

/// Number of unit tests with FPR strictly above the threshold.
int count_failed_unit_tests(const std::map<std::string, double>& unit_fprs,
                            double fail_threshold = 0.10);

/// Area above the step CDF on [0, 1]; equals the mean of the underlying
/// values. Exposed for report consumers and invariant checks.
double area_over_cdf(const std::vector<std::pair<double, double>>& cdf_points);

}  // namespace oodeval
