#pragma once

#include <filesystem>
#include <string>

#include "ensemble/harness.hpp"

namespace ensemble {

enum class ReportFormat { Json, Table, Both };

/// Structured form, schema "ensemble-eval-report" version 1.
nlohmann::ordered_json report_json(const EvalReport& r);

/// Table with columns Network, Accuracy, Sensitivity, Specificity, F1 score,
/// AUC. Accuracy, sensitivity and specificity are percentages, F1 and AUC
/// fractions; every cell is "mean ± std" with two decimals. Metrics that
/// were undefined in some iterations get a '*' and a footnote.
std::string render_table(const EvalReport& r);

/// Writes report.json and/or report.txt into `dir` (created if needed).
void emit_report(const EvalReport& r, const std::filesystem::path& dir,
                 ReportFormat format = ReportFormat::Both);

}  // namespace ensemble
