// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "oodeval/metrics.hpp"

namespace oodeval {

enum class ReportFormat { json, csv, md };

ReportFormat report_format_from_name(const std::string& name);
const char* report_format_extension(ReportFormat f);

/// Deterministic rendering: fixed key order, shortest round-trip doubles.
std::string render_report(const EvalReport& report, ReportFormat format);

/// Combined per-method summary table. When an "msp" report is present the
/// md format appends signed mean-FPR deltas against it.
std::string render_summary(const std::vector<EvalReport>& reports,
                           ReportFormat format);

/// Parses a JSON report produced by render_report.
EvalReport parse_report_json(const std::string& text);

}  // namespace oodeval
