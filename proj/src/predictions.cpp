#include "ensemble/predictions.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <tuple>

#include "ensemble/error.hpp"
#include "ensemble/table.hpp"

namespace ensemble {
namespace {

using Key = std::tuple<long long, std::string, std::string>;

Key key_of(const PredictionRecord& r) {
  return {r.iteration ? static_cast<long long>(*r.iteration) : -1, r.model_id, r.image_id};
}

void append_file(const std::filesystem::path& path, LabelSpace space,
                 std::set<Key>& seen, std::vector<PredictionRecord>& out) {
  const DelimitedTable table = DelimitedTable::read(path);
  const auto iter_col = table.find_column("iteration");
  const std::size_t model_col = table.column("model_id");
  const std::size_t image_col = table.column("image_id");
  const std::size_t decision_col = table.column("decision");
  const std::size_t score_col = table.column("score");

  for (const auto& row : table.rows()) {
    PredictionRecord r;
    r.model_id = row.fields[model_col];
    r.image_id = row.fields[image_col];
    if (r.model_id.empty() || r.image_id.empty()) {
      throw ParseError(table.where(row) + ": empty model_id or image_id");
    }
    const std::string subject = "model '" + r.model_id + "', image '" + r.image_id + "'";
    if (iter_col && !row.fields[*iter_col].empty()) {
      const auto it = parse_int(row.fields[*iter_col]);
      if (!it || *it < 0) {
        throw ParseError(table.where(row) + ": bad iteration '" + row.fields[*iter_col] + "'");
      }
      r.iteration = static_cast<std::size_t>(*it);
    }
    const auto code = parse_int(row.fields[decision_col]);
    if (!code) {
      throw ParseError(table.where(row) + ": decision '" + row.fields[decision_col] +
                       "' is not an integer");
    }
    r.decision = ClassLabel{static_cast<int>(*code)};
    if (!space.contains(r.decision)) {
      throw LabelError(table.where(row) + ": illegal decision " + row.fields[decision_col] +
                       " for " + subject);
    }
    const auto score = parse_real(row.fields[score_col]);
    if (!score) {
      throw ParseError(table.where(row) + ": score '" + row.fields[score_col] +
                       "' is not a number");
    }
    if (*score < 0.0 || *score > 1.0) {
      throw DomainError(table.where(row) + ": score " + row.fields[score_col] +
                        " outside [0,1] for " + subject);
    }
    r.score = *score;
    if (!seen.insert(key_of(r)).second) {
      throw ParseError(table.where(row) + ": duplicate record for " + subject);
    }
    out.push_back(std::move(r));
  }
}

}  // namespace

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path,
                                               LabelSpace space) {
  return read_predictions(std::span(&path, 1), space);
}

std::vector<PredictionRecord> read_predictions(std::span<const std::filesystem::path> paths,
                                               LabelSpace space) {
  std::set<Key> seen;
  std::vector<PredictionRecord> out;
  for (const auto& p : paths) append_file(p, space, seen, out);
  return out;
}

void write_predictions(const std::filesystem::path& path,
                       std::span<const PredictionRecord> records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const bool with_iteration = std::any_of(records.begin(), records.end(),
                                          [](const auto& r) { return r.iteration.has_value(); });
  out << (with_iteration ? "iteration," : "") << "model_id,image_id,decision,score\n";
  char buf[32];
  for (const auto& r : records) {
    if (with_iteration) {
      if (r.iteration) out << *r.iteration;
      out << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", r.score);
    out << r.model_id << ',' << r.image_id << ',' << r.decision.code << ',' << buf << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace ensemble
