// SPDX-License-Identifier: Apache-2.0
#include "oodeval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "oodeval/errors.hpp"

namespace oodeval {

namespace {

std::vector<double> sorted_values(const Eigen::VectorXd& v, bool descending) {
  std::vector<double> out(v.data(), v.data() + v.size());
  if (descending)
    std::sort(out.begin(), out.end(), std::greater<double>());
  else
    std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double threshold_at_tpr(const Eigen::VectorXd& id_scores, double q) {
  if (!(q > 0.0 && q <= 1.0))
    throw DataError("threshold_at_tpr: Q must be in (0, 1]");
  if (id_scores.size() == 0)
    throw DataError("threshold_at_tpr: empty ID scores");
  const auto n = static_cast<double>(id_scores.size());
  // smallest integer k >= q*N; the 1e-9 snap keeps decimal Q values whose
  // binary representation overshoots (e.g. 0.9*20 = 18.000000000000004)
  // from selecting one order statistic too deep
  auto k = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  k = std::min<std::size_t>(std::max<std::size_t>(k, 1),
                            static_cast<std::size_t>(id_scores.size()));
  const std::vector<double> desc = sorted_values(id_scores, /*descending=*/true);
  return desc[k - 1];
}

double fpr_at_threshold(const Eigen::VectorXd& ood_scores, double tau) {
  if (ood_scores.size() == 0)
    throw DataError("fpr_at_threshold: empty OOD scores");
  std::size_t accepted = 0;
  for (Eigen::Index i = 0; i < ood_scores.size(); ++i)
    if (ood_scores(i) >= tau) ++accepted;
  return static_cast<double>(accepted) / static_cast<double>(ood_scores.size());
}

double fpr_at_tpr(const Eigen::VectorXd& id_scores,
                  const Eigen::VectorXd& ood_scores, double q) {
  return fpr_at_threshold(ood_scores, threshold_at_tpr(id_scores, q));
}

double auroc(const Eigen::VectorXd& id_scores,
             const Eigen::VectorXd& ood_scores) {
  if (id_scores.size() == 0 || ood_scores.size() == 0)
    throw DataError("auroc: empty score vector");
  const std::vector<double> id = sorted_values(id_scores, false);
  const std::vector<double> ood = sorted_values(ood_scores, false);

  // sweep distinct values ascending; every partial sum is a multiple of 0.5
  // and therefore exact, so the result equals brute-force pair counting
  double wins = 0.0;
  std::size_t i = 0, j = 0;
  std::size_t ood_below = 0;
  while (i < id.size()) {
    const double v = (j < ood.size()) ? std::min(id[i], ood[j]) : id[i];
    std::size_t id_at = 0, ood_at = 0;
    while (i < id.size() && id[i] == v) { ++i; ++id_at; }
    while (j < ood.size() && ood[j] == v) { ++j; ++ood_at; }
    if (id_at > 0)
      wins += static_cast<double>(id_at) *
              (static_cast<double>(ood_below) + 0.5 * static_cast<double>(ood_at));
    ood_below += ood_at;
  }
  return wins / (static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

double aupr(const Eigen::VectorXd& id_scores, const Eigen::VectorXd& ood_scores,
            PositiveClass positive) {
  if (id_scores.size() == 0 || ood_scores.size() == 0)
    throw DataError("aupr: empty score vector");
  const double sign = positive == PositiveClass::id ? 1.0 : -1.0;
  std::vector<std::pair<double, bool>> ranked;  // (score, is_positive)
  ranked.reserve(static_cast<std::size_t>(id_scores.size() + ood_scores.size()));
  for (Eigen::Index i = 0; i < id_scores.size(); ++i)
    ranked.emplace_back(sign * id_scores(i), positive == PositiveClass::id);
  for (Eigen::Index i = 0; i < ood_scores.size(); ++i)
    ranked.emplace_back(sign * ood_scores(i), positive == PositiveClass::ood);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  const double total_pos =
      positive == PositiveClass::id ? static_cast<double>(id_scores.size())
                                    : static_cast<double>(ood_scores.size());
  double ap = 0.0;
  double tp = 0.0, seen = 0.0, prev_recall = 0.0;
  std::size_t i = 0;
  while (i < ranked.size()) {
    const double v = ranked[i].first;
    while (i < ranked.size() && ranked[i].first == v) {
      if (ranked[i].second) tp += 1.0;
      seen += 1.0;
      ++i;
    }
    const double recall = tp / total_pos;
    const double precision = tp / seen;
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

EvalReport per_class_report(
    const std::string& method, const Eigen::VectorXd& id_scores,
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& ood_scores,
    double q) {
  EvalReport report;
  report.method = method;
  report.tpr_q = q;
  report.threshold_tau = threshold_at_tpr(id_scores, q);

  for (const auto& [name, scores] : ood_scores) {
    ClassMetrics cm;
    cm.class_name = name;
    cm.n = static_cast<std::size_t>(scores.size());
    cm.fpr_at_tpr = fpr_at_threshold(scores, report.threshold_tau);
    cm.auroc = auroc(id_scores, scores);
    cm.aupr_s = aupr(id_scores, scores, PositiveClass::id);
    cm.aupr_e = aupr(id_scores, scores, PositiveClass::ood);
    report.per_class.push_back(std::move(cm));
  }

  const auto k = static_cast<double>(report.per_class.size());
  if (k > 0) {
    // summing in sorted order makes the means independent of class order
    auto sorted_mean = [&](auto&& getter) {
      std::vector<double> values;
      values.reserve(report.per_class.size());
      for (const auto& cm : report.per_class) values.push_back(getter(cm));
      std::sort(values.begin(), values.end());
      double total = 0.0;
      for (double v : values) total += v;
      return total / k;
    };
    report.mean_fpr = sorted_mean([](const ClassMetrics& c) { return c.fpr_at_tpr; });
    report.mean_auroc = sorted_mean([](const ClassMetrics& c) { return c.auroc; });
    report.mean_aupr_s = sorted_mean([](const ClassMetrics& c) { return c.aupr_s; });
    report.mean_aupr_e = sorted_mean([](const ClassMetrics& c) { return c.aupr_e; });

    std::vector<double> fprs;
    fprs.reserve(report.per_class.size());
    for (const auto& cm : report.per_class) fprs.push_back(cm.fpr_at_tpr);
    std::sort(fprs.begin(), fprs.end());
    for (std::size_t i = 0; i < fprs.size(); ++i) {
      const bool last_of_value = i + 1 == fprs.size() || fprs[i + 1] != fprs[i];
      if (last_of_value)
        report.cdf_points.emplace_back(
            fprs[i], static_cast<double>(i + 1) / k);
    }
  }
  return report;
}

int count_failed_unit_tests(const std::map<std::string, double>& unit_fprs,
                            double fail_threshold) {
  int failed = 0;
  for (const auto& [name, fpr] : unit_fprs)
    if (fpr > fail_threshold) ++failed;
  return failed;
}

double area_over_cdf(
    const std::vector<std::pair<double, double>>& cdf_points) {
  if (cdf_points.empty()) return 0.0;
  double area = cdf_points.front().first;  // CDF is 0 below the first value
  for (std::size_t i = 0; i + 1 < cdf_points.size(); ++i)
    area += (cdf_points[i + 1].first - cdf_points[i].first) *
            (1.0 - cdf_points[i].second);
  return area;
}

}  // namespace oodeval
