// SPDX-License-Identifier: Apache-2.0
#include "oodeval/report_io.hpp"

#include <sstream>

#include <json.hpp>

#include "oodeval/errors.hpp"

namespace oodeval {

namespace {

using ordered_json = nlohmann::ordered_json;

/// Shortest round-trip decimal form, identical to the JSON encoding.
std::string fmt(double v) { return ordered_json(v).dump(); }

ordered_json report_to_json(const EvalReport& r) {
  ordered_json doc;
  doc["method"] = r.method;
  doc["tpr_q"] = r.tpr_q;
  doc["threshold_tau"] = r.threshold_tau;
  ordered_json classes = ordered_json::array();
  for (const auto& cm : r.per_class)
    classes.push_back({{"class_name", cm.class_name},
                       {"n", cm.n},
                       {"fpr_at_tpr", cm.fpr_at_tpr},
                       {"auroc", cm.auroc},
                       {"aupr_s", cm.aupr_s},
                       {"aupr_e", cm.aupr_e}});
  doc["per_class"] = std::move(classes);
  if (!r.per_class.empty()) {
    doc["aggregates"] = {{"mean_fpr", r.mean_fpr},
                         {"mean_auroc", r.mean_auroc},
                         {"mean_aupr_s", r.mean_aupr_s},
                         {"mean_aupr_e", r.mean_aupr_e}};
    ordered_json cdf = ordered_json::array();
    for (const auto& [value, fraction] : r.cdf_points)
      cdf.push_back({value, fraction});
    doc["cdf_points"] = std::move(cdf);
  }
  if (r.unit_tests) {
    ordered_json ut;
    ut["fail_threshold"] = r.unit_tests->fail_threshold;
    ordered_json per_test = ordered_json::object();
    for (const auto& [name, fpr] : r.unit_tests->per_test_fpr)
      per_test[name] = fpr;
    ut["per_test_fpr"] = std::move(per_test);
    ut["failed"] = r.unit_tests->failed;
    doc["unit_tests"] = std::move(ut);
  }
  return doc;
}

std::string render_report_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "# method," << r.method << "\n";
  out << "# tpr_q," << fmt(r.tpr_q) << "\n";
  out << "# threshold_tau," << fmt(r.threshold_tau) << "\n";
  out << "class_name,n,fpr_at_tpr,auroc,aupr_s,aupr_e\n";
  for (const auto& cm : r.per_class)
    out << cm.class_name << ',' << cm.n << ',' << fmt(cm.fpr_at_tpr) << ','
        << fmt(cm.auroc) << ',' << fmt(cm.aupr_s) << ',' << fmt(cm.aupr_e)
        << "\n";
  if (!r.per_class.empty()) {
    out << "mean,," << fmt(r.mean_fpr) << ',' << fmt(r.mean_auroc) << ','
        << fmt(r.mean_aupr_s) << ',' << fmt(r.mean_aupr_e) << "\n";
    out << "\ncdf_fpr,fraction_of_classes\n";
    for (const auto& [value, fraction] : r.cdf_points)
      out << fmt(value) << ',' << fmt(fraction) << "\n";
  }
  if (r.unit_tests) {
    out << "\nunit_test,fpr,failed\n";
    for (const auto& [name, fpr] : r.unit_tests->per_test_fpr)
      out << name << ',' << fmt(fpr) << ','
          << (fpr > r.unit_tests->fail_threshold ? 1 : 0) << "\n";
    out << "total_failed,," << r.unit_tests->failed << "\n";
  }
  return out.str();
}

std::string render_report_md(const EvalReport& r) {
  std::ostringstream out;
  out << "# Report: " << r.method << "\n\n";
  out << "- TPR target Q: " << fmt(r.tpr_q) << "\n";
  out << "- threshold tau: " << fmt(r.threshold_tau) << "\n\n";
  if (!r.per_class.empty()) {
    out << "| class | n | FPR@TPR | AUROC | AUPR-S | AUPR-E |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& cm : r.per_class)
      out << "| " << cm.class_name << " | " << cm.n << " | "
          << fmt(cm.fpr_at_tpr) << " | " << fmt(cm.auroc) << " | "
          << fmt(cm.aupr_s) << " | " << fmt(cm.aupr_e) << " |\n";
    out << "| **mean** | | " << fmt(r.mean_fpr) << " | " << fmt(r.mean_auroc)
        << " | " << fmt(r.mean_aupr_s) << " | " << fmt(r.mean_aupr_e)
        << " |\n";
  }
  if (r.unit_tests) {
    out << "\n## Unit tests (fail threshold "
        << fmt(r.unit_tests->fail_threshold) << ")\n\n";
    out << "| suite | FPR | verdict |\n|---|---|---|\n";
    for (const auto& [name, fpr] : r.unit_tests->per_test_fpr)
      out << "| " << name << " | " << fmt(fpr) << " | "
          << (fpr > r.unit_tests->fail_threshold ? "FAIL" : "pass") << " |\n";
    out << "\nfailed: " << r.unit_tests->failed << "\n";
  }
  return out.str();
}

}  // namespace

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "md") return ReportFormat::md;
  throw DataError("unknown report format '" + name + "'");
}

const char* report_format_extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::json: return "json";
    case ReportFormat::csv: return "csv";
    case ReportFormat::md: return "md";
  }
  return "?";
}

std::string render_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return report_to_json(report).dump(2) + "\n";
    case ReportFormat::csv: return render_report_csv(report);
    case ReportFormat::md: return render_report_md(report);
  }
  return {};
}

std::string render_summary(const std::vector<EvalReport>& reports,
                           ReportFormat format) {
  const EvalReport* msp = nullptr;
  for (const auto& r : reports)
    if (r.method == "msp") msp = &r;

  if (format == ReportFormat::json) {
    ordered_json doc = ordered_json::array();
    for (const auto& r : reports) {
      ordered_json row;
      row["method"] = r.method;
      row["mean_fpr"] = r.mean_fpr;
      row["mean_auroc"] = r.mean_auroc;
      row["mean_aupr_s"] = r.mean_aupr_s;
      row["mean_aupr_e"] = r.mean_aupr_e;
      if (r.unit_tests) row["failed_unit_tests"] = r.unit_tests->failed;
      if (msp != nullptr) row["delta_fpr_vs_msp"] = r.mean_fpr - msp->mean_fpr;
      doc.push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << "method,mean_fpr,mean_auroc,mean_aupr_s,mean_aupr_e,"
           "failed_unit_tests,delta_fpr_vs_msp\n";
    for (const auto& r : reports) {
      out << r.method << ',' << fmt(r.mean_fpr) << ',' << fmt(r.mean_auroc)
          << ',' << fmt(r.mean_aupr_s) << ',' << fmt(r.mean_aupr_e) << ',';
      if (r.unit_tests) out << r.unit_tests->failed;
      out << ',';
      if (msp != nullptr) out << fmt(r.mean_fpr - msp->mean_fpr);
      out << "\n";
    }
    return out.str();
  }

  out << "| method | mean FPR | mean AUROC | mean AUPR-S | mean AUPR-E | "
         "failed unit tests | dFPR vs MSP |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    out << "| " << r.method << " | " << fmt(r.mean_fpr) << " | "
        << fmt(r.mean_auroc) << " | " << fmt(r.mean_aupr_s) << " | "
        << fmt(r.mean_aupr_e) << " | ";
    if (r.unit_tests)
      out << r.unit_tests->failed;
    else
      out << "-";
    out << " | ";
    if (msp != nullptr) {
      const double delta = r.mean_fpr - msp->mean_fpr;
      out << (delta >= 0 ? "+" : "") << fmt(delta);
    } else {
      out << "-";
    }
    out << " |\n";
  }
  return out.str();
}

EvalReport parse_report_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("report: invalid JSON: ") + e.what());
  }
  EvalReport r;
  try {
    r.method = doc.at("method").get<std::string>();
    r.tpr_q = doc.at("tpr_q").get<double>();
    r.threshold_tau = doc.at("threshold_tau").get<double>();
    for (const auto& entry : doc.at("per_class")) {
      ClassMetrics cm;
      cm.class_name = entry.at("class_name").get<std::string>();
      cm.n = entry.at("n").get<std::size_t>();
      cm.fpr_at_tpr = entry.at("fpr_at_tpr").get<double>();
      cm.auroc = entry.at("auroc").get<double>();
      cm.aupr_s = entry.at("aupr_s").get<double>();
      cm.aupr_e = entry.at("aupr_e").get<double>();
      r.per_class.push_back(std::move(cm));
    }
    if (doc.contains("aggregates")) {
      const auto& agg = doc.at("aggregates");
      r.mean_fpr = agg.at("mean_fpr").get<double>();
      r.mean_auroc = agg.at("mean_auroc").get<double>();
      r.mean_aupr_s = agg.at("mean_aupr_s").get<double>();
      r.mean_aupr_e = agg.at("mean_aupr_e").get<double>();
      for (const auto& point : doc.at("cdf_points"))
        r.cdf_points.emplace_back(point.at(0).get<double>(),
                                  point.at(1).get<double>());
    }
    if (doc.contains("unit_tests")) {
      UnitTestBlock ut;
      const auto& block = doc.at("unit_tests");
      ut.fail_threshold = block.at("fail_threshold").get<double>();
      for (const auto& [name, fpr] : block.at("per_test_fpr").items())
        ut.per_test_fpr[name] = fpr.get<double>();
      ut.failed = block.at("failed").get<int>();
      r.unit_tests = std::move(ut);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report: missing or malformed field: ") +
                    e.what());
  }
  return r;
}

}  // namespace oodeval
