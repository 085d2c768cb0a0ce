#include "ensemble/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "ensemble/error.hpp"

namespace ensemble {
namespace {

void check_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw DimensionError(std::string("duplicate ") + what + " id '" + id + "'");
    }
  }
}

void check_shape(std::size_t rows, std::size_t cols, std::size_t entries) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("matrix needs at least one model and one image");
  }
  if (entries != rows * cols) {
    throw DimensionError("matrix has " + std::to_string(entries) +
                         " entries, expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
}

bool is_probability(double s) { return s >= 0.0 && s <= 1.0; }

// Mean of the scores at `voters`, summed in ascending order so the result
// does not depend on row order. Clamped to the voter range against rounding.
double voter_mean(std::span<const double> scores,
                  const std::vector<std::size_t>& voters,
                  std::vector<double>& scratch) {
  scratch.clear();
  for (auto v : voters) scratch.push_back(scores[v]);
  std::sort(scratch.begin(), scratch.end());
  double sum = 0.0;
  for (double x : scratch) sum += x;
  double mean = sum / static_cast<double>(scratch.size());
  return std::clamp(mean, scratch.front(), scratch.back());
}

struct Tally {
  ClassLabel label;
  std::vector<std::size_t> voters;
  double mean = 0.0;
};

ColumnMode mode_of(std::span<const ClassLabel> decisions,
                   std::span<const double> scores,
                   std::vector<double>& scratch) {
  // Committees are small; a flat list beats a map here.
  std::vector<Tally> tallies;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    auto it = std::find_if(tallies.begin(), tallies.end(),
                           [&](const Tally& t) { return t.label == decisions[i]; });
    if (it == tallies.end()) {
      tallies.push_back({decisions[i], {i}, 0.0});
    } else {
      it->voters.push_back(i);
    }
  }
  std::size_t best_count = 0;
  for (const auto& t : tallies) best_count = std::max(best_count, t.voters.size());

  const Tally* best = nullptr;
  for (auto& t : tallies) {
    if (t.voters.size() != best_count) continue;
    t.mean = voter_mean(scores, t.voters, scratch);
    if (best == nullptr || t.mean > best->mean ||
        (t.mean == best->mean && t.label < best->label)) {
      best = &t;
    }
  }
  return {best->label, best->voters};
}

void check_column_inputs(std::span<const ClassLabel> decisions,
                         std::span<const double> scores) {
  if (decisions.empty()) throw DimensionError("column_mode on an empty column");
  if (decisions.size() != scores.size()) {
    throw DimensionError("column has " + std::to_string(decisions.size()) +
                         " decisions but " + std::to_string(scores.size()) +
                         " scores");
  }
  for (double s : scores) {
    if (!is_probability(s)) {
      throw DomainError("score " + std::to_string(s) + " outside [0,1]");
    }
  }
}

FusionResult prepare(const DecisionMatrix& d, const ScoreMatrix& s) {
  check_paired(d, s);
  FusionResult out;
  out.image_ids = d.image_ids();
  out.dm.resize(d.images());
  out.ds.resize(d.images());
  out.support.resize(d.images());
  return out;
}

// Gathers column `j` and stores its fused values into `out`.
void fuse_column(const DecisionMatrix& d, const ScoreMatrix& s, std::size_t j,
                 std::vector<ClassLabel>& col_d, std::vector<double>& col_s,
                 std::vector<double>& scratch, FusionResult& out) {
  const std::size_t n = d.models();
  for (std::size_t m = 0; m < n; ++m) {
    col_d[m] = d.at(m, j);
    col_s[m] = s.at(m, j);
  }
  ColumnMode mode = mode_of(col_d, col_s, scratch);
  out.dm[j] = mode.label;
  out.ds[j] = voter_mean(col_s, mode.voters, scratch);
  out.support[j] = mode.voters.size();
}

}  // namespace

DecisionMatrix::DecisionMatrix(std::vector<std::string> model_ids,
                               std::vector<std::string> image_ids,
                               std::vector<ClassLabel> entries, LabelSpace space)
    : model_ids_(std::move(model_ids)),
      image_ids_(std::move(image_ids)),
      entries_(std::move(entries)),
      space_(space) {
  check_shape(model_ids_.size(), image_ids_.size(), entries_.size());
  check_unique(model_ids_, "model");
  check_unique(image_ids_, "image");
  for (auto label : entries_) space_.check(label);
}

ScoreMatrix::ScoreMatrix(std::vector<std::string> model_ids,
                         std::vector<std::string> image_ids,
                         std::vector<double> entries)
    : model_ids_(std::move(model_ids)),
      image_ids_(std::move(image_ids)),
      entries_(std::move(entries)) {
  check_shape(model_ids_.size(), image_ids_.size(), entries_.size());
  check_unique(model_ids_, "model");
  check_unique(image_ids_, "image");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!is_probability(entries_[i])) {
      throw DomainError("score " + std::to_string(entries_[i]) + " for model '" +
                        model_ids_[i / images()] + "', image '" +
                        image_ids_[i % images()] + "' outside [0,1]");
    }
  }
}

void check_paired(const DecisionMatrix& d, const ScoreMatrix& s) {
  if (d.models() != s.models() || d.images() != s.images()) {
    throw PairingError("decision matrix is " + std::to_string(d.models()) + "x" +
                       std::to_string(d.images()) + " but score matrix is " +
                       std::to_string(s.models()) + "x" +
                       std::to_string(s.images()));
  }
  if (d.model_ids() != s.model_ids()) {
    throw PairingError("decision and score matrices list different model ids");
  }
  if (d.image_ids() != s.image_ids()) {
    throw PairingError("decision and score matrices list different image ids");
  }
}

ColumnMode column_mode(std::span<const ClassLabel> decisions,
                       std::span<const double> scores) {
  check_column_inputs(decisions, scores);
  std::vector<double> scratch;
  return mode_of(decisions, scores, scratch);
}

FusionResult fuse_serial(const DecisionMatrix& d, const ScoreMatrix& s) {
  FusionResult out = prepare(d, s);
  std::vector<ClassLabel> col_d(d.models());
  std::vector<double> col_s(d.models());
  std::vector<double> scratch;
  for (std::size_t j = 0; j < d.images(); ++j) {
    fuse_column(d, s, j, col_d, col_s, scratch, out);
  }
  return out;
}

FusionResult fuse(const DecisionMatrix& d, const ScoreMatrix& s) {
  FusionResult out = prepare(d, s);
  const auto k = static_cast<std::ptrdiff_t>(d.images());
#pragma omp parallel
  {
    std::vector<ClassLabel> col_d(d.models());
    std::vector<double> col_s(d.models());
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < k; ++j) {
      fuse_column(d, s, static_cast<std::size_t>(j), col_d, col_s, scratch, out);
    }
  }
  return out;
}

double grouped_mode(const GroupedModeInput& g) {
  if (!(g.width > 0.0) || !std::isfinite(g.width)) {
    throw DomainError("class-interval width must be positive, got " +
                      std::to_string(g.width));
  }
  if (!std::isfinite(g.lower)) throw DomainError("lower limit must be finite");
  for (double f : {g.modal_freq, g.before_freq, g.after_freq}) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw DomainError("frequencies must be finite and nonnegative");
    }
  }
  const double denom = 2.0 * g.modal_freq - g.before_freq - g.after_freq;
  if (denom == 0.0) {
    throw SingularModeError("grouped mode undefined: 2*f1 - f0 - f2 == 0");
  }
  return g.lower + ((g.modal_freq - g.before_freq) / denom) * g.width;
}

}  // namespace ensemble
