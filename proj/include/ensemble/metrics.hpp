#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ensemble/labels.hpp"

namespace ensemble {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Tallies predictions against truth. Every label other than `positive`
/// counts as negative.
ConfusionCounts confusion(std::span<const ClassLabel> truth,
                          std::span<const ClassLabel> predicted,
                          ClassLabel positive);

/// Metric values; std::nullopt marks a metric whose denominator was zero.
struct MetricSet {
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> f1;
  std::optional<double> auc;
};

/// Accuracy (tp+tn)/total, sensitivity tp/(tp+fn), specificity tn/(tn+fp),
/// f1 2tp/(2tp+fp+fn). `auc` is left empty. Throws EmptyEvaluationError when
/// total is zero.
MetricSet metric_set(const ConfusionCounts& c);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// points[0] is (0,0); points[i] (i >= 1) is the operating point when
/// predicting positive for score >= thresholds[i-1]. The last point is (1,1).
struct RocCurve {
  std::vector<RocPoint> points;
  std::vector<double> thresholds;  ///< distinct scores, strictly decreasing
};

struct RocResult {
  RocCurve curve;
  double auc = 0.0;
};

/// ROC curve over all distinct score thresholds and its trapezoidal area.
/// Larger scores mean "more positive". Samples sharing a score move together,
/// so the area equals the pairwise ranking statistic with half credit for
/// ties. Throws DegenerateRocError when truth holds a single class.
RocResult roc_and_auc(std::span<const ClassLabel> truth,
                      std::span<const double> scores, ClassLabel positive);

/// Maps a decided-class probability to the probability of `positive`
/// (binary problems only).
double positive_score(ClassLabel decision, double decided_score,
                      ClassLabel positive);

}  // namespace ensemble
