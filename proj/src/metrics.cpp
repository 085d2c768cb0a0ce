#include "ensemble/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ensemble/error.hpp"

namespace ensemble {
namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts confusion(std::span<const ClassLabel> truth,
                          std::span<const ClassLabel> predicted,
                          ClassLabel positive) {
  if (truth.size() != predicted.size()) {
    throw DimensionError("truth has " + std::to_string(truth.size()) +
                         " labels but predictions have " +
                         std::to_string(predicted.size()));
  }
  if (truth.empty()) throw DimensionError("confusion on empty inputs");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == positive;
    const bool called = predicted[i] == positive;
    if (actual) {
      called ? ++c.tp : ++c.fn;
    } else {
      called ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

MetricSet metric_set(const ConfusionCounts& c) {
  if (c.total() == 0) throw EmptyEvaluationError("no samples to evaluate");
  MetricSet m;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.sensitivity = ratio(c.tp, c.tp + c.fn);
  m.specificity = ratio(c.tn, c.tn + c.fp);
  m.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  return m;
}

RocResult roc_and_auc(std::span<const ClassLabel> truth,
                      std::span<const double> scores, ClassLabel positive) {
  if (truth.size() != scores.size()) {
    throw DimensionError("truth has " + std::to_string(truth.size()) +
                         " labels but " + std::to_string(scores.size()) +
                         " scores");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw DomainError("ROC scores must be finite");
  }
  std::uint64_t pos = 0;
  for (auto t : truth) pos += (t == positive);
  const std::uint64_t neg = truth.size() - pos;
  if (pos == 0 || neg == 0) {
    throw DegenerateRocError("ROC needs both positive and negative samples");
  }

  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocResult out;
  out.curve.points.push_back({0.0, 0.0});
  // Twice the area in units of one positive-negative pair, kept integral.
  std::uint64_t area2 = 0;
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    const std::uint64_t tp0 = tp, fp0 = fp;
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      (truth[order[i]] == positive) ? ++tp : ++fp;
    }
    area2 += (fp - fp0) * (tp + tp0);
    out.curve.thresholds.push_back(threshold);
    out.curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
  }
  out.auc = static_cast<double>(area2) /
            (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return out;
}

double positive_score(ClassLabel decision, double decided_score,
                      ClassLabel positive) {
  return decision == positive ? decided_score : 1.0 - decided_score;
}

}  // namespace ensemble
