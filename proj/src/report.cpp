#include "ensemble/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <fstream>

#include "ensemble/error.hpp"

namespace ensemble {
namespace {

using json = nlohmann::ordered_json;

struct Column {
  const char* title;
  const char* key;
  MetricSummary ModelReport::*field;
  double scale;
};

constexpr std::array<Column, 5> kColumns{{
    {"Accuracy", "accuracy", &ModelReport::accuracy, 100.0},
    {"Sensitivity", "sensitivity", &ModelReport::sensitivity, 100.0},
    {"Specificity", "specificity", &ModelReport::specificity, 100.0},
    {"F1 score", "f1", &ModelReport::f1, 1.0},
    {"AUC", "auc", &ModelReport::auc, 1.0},
}};

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json summary_json(const MetricSummary& s) {
  json values = json::array();
  for (const auto& v : s.per_iteration) values.push_back(optional_json(v));
  return {{"mean", optional_json(s.mean)},
          {"std", optional_json(s.std)},
          {"defined", s.defined},
          {"excluded", s.excluded},
          {"per_iteration", std::move(values)}};
}

std::string cell(const MetricSummary& s, double scale) {
  if (!s.mean) return "n/a";
  std::string out = fmt::format("{:.2f} ± {:.2f}", *s.mean * scale, *s.std * scale);
  if (s.excluded > 0) out += "*";
  return out;
}

// Display width, counting each UTF-8 code point once.
std::size_t width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string pad(const std::string& s, std::size_t w) {
  return s + std::string(w > width(s) ? w - width(s) : 0, ' ');
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

json report_json(const EvalReport& r) {
  json j;
  j["schema"] = "ensemble-eval-report";
  j["version"] = 1;
  j["iterations"] = r.iterations;
  j["config"] = r.config;
  j["models"] = json::array();
  for (const auto& row : r.rows) {
    json metrics;
    for (const auto& col : kColumns) metrics[col.key] = summary_json(row.*col.field);
    j["models"].push_back(
        {{"model_id", row.model_id}, {"ensemble", row.is_ensemble}, {"metrics", metrics}});
  }
  return j;
}

std::string render_table(const EvalReport& r) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Network"});
  for (const auto& col : kColumns) grid.back().push_back(col.title);
  std::vector<std::string> notes;
  for (const auto& row : r.rows) {
    const std::string name = row.is_ensemble ? "Ensemble" : row.model_id;
    grid.push_back({name});
    for (const auto& col : kColumns) {
      const MetricSummary& s = row.*col.field;
      grid.back().push_back(cell(s, col.scale));
      if (s.excluded > 0) {
        notes.push_back(fmt::format("* {} of {}: undefined in {} of {} iterations; "
                                    "mean ± std over the remaining {}.",
                                    col.title, name, s.excluded, s.per_iteration.size(),
                                    s.defined));
      }
    }
  }

  std::vector<std::size_t> widths(grid.front().size(), 0);
  for (const auto& line : grid) {
    for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], width(line[c]));
  }

  std::string out;
  const auto& cfg = r.config;
  out += fmt::format("Iterations: {}", r.iterations);
  if (cfg.contains("train_fraction")) {
    out += fmt::format("  train fraction: {:.2f}", cfg["train_fraction"].get<double>());
  }
  if (cfg.contains("seed")) out += fmt::format("  seed: {}", cfg["seed"].get<std::uint64_t>());
  if (cfg.contains("augmentation")) {
    out += fmt::format("  augmentation: {}",
                       cfg["augmentation"]["enabled"].get<bool>() ? "on" : "off");
  }
  out += "\n\n";
  for (std::size_t l = 0; l < grid.size(); ++l) {
    std::string line = "|";
    for (std::size_t c = 0; c < grid[l].size(); ++c) line += " " + pad(grid[l][c], widths[c]) + " |";
    out += line + "\n";
    if (l == 0) {
      std::string rule = "|";
      for (auto w : widths) rule += std::string(w + 2, '-') + "|";
      out += rule + "\n";
    }
  }
  if (!notes.empty()) {
    out += "\n";
    for (const auto& n : notes) out += n + "\n";
  }
  return out;
}

void emit_report(const EvalReport& r, const std::filesystem::path& dir, ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  if (format != ReportFormat::Table) write_file(dir / "report.json", report_json(r).dump(2) + "\n");
  if (format != ReportFormat::Json) write_file(dir / "report.txt", render_table(r));
}

}  // namespace ensemble
