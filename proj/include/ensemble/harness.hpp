#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ensemble/baseline.hpp"
#include "ensemble/dataset.hpp"
#include "ensemble/fusion.hpp"
#include "ensemble/metrics.hpp"
#include "ensemble/predictions.hpp"
#include "ensemble/preprocess.hpp"
#include "json.hpp"

namespace ensemble {

struct MemberSpec {
  enum class Kind { Logistic, Centroid };

  std::string id;
  Kind kind = Kind::Logistic;
  int side = 32;  ///< feature grid is side x side

  bool operator==(const MemberSpec&) const = default;
};

struct CommitteeConfig {
  std::vector<MemberSpec> members;
  TrainConfig train;    ///< seed is re-derived per (iteration, member)
  int input_side = 224;  ///< images are normalized to this square before augmentation

  void validate() const;
};

/// Built-in members: "A" logistic32, "B" logistic16, "C" centroid16,
/// "D" logistic8. Accepts either the letter or the id.
MemberSpec builtin_member(std::string_view name);

/// "augmented" (A,B,C), "plain" (B,C,D) or a comma-separated member list.
CommitteeConfig committee_preset(std::string_view name);

/// JSON committee definition:
/// {"input_side": 224, "members": [{"id": "...", "kind": "logistic"|"centroid",
///  "side": 32}, ...], "train": {"mini_batch": 5, ...}}. Missing keys keep
/// their defaults.
CommitteeConfig load_committee(const std::filesystem::path& path);

struct RunOptions {
  ClassLabel positive = kNegativeOne;
  bool augment = false;
  /// Distribution only; the seed is taken from the split plan.
  AugmentationConfig augmentation;
  /// When set, augmented training images of the first iteration are written
  /// here as PNG.
  std::optional<std::filesystem::path> debug_png_dir;
};

/// One metric across iterations. Undefined values are excluded from mean
/// and std; std is the sample standard deviation (0 for one value).
struct MetricSummary {
  std::vector<std::optional<double>> per_iteration;
  std::optional<double> mean;
  std::optional<double> std;
  std::size_t defined = 0;
  std::size_t excluded = 0;

  bool operator==(const MetricSummary&) const = default;
};

MetricSummary summarize(std::vector<std::optional<double>> values);

struct ModelReport {
  std::string model_id;
  bool is_ensemble = false;
  MetricSummary accuracy, sensitivity, specificity, f1, auc;

  bool operator==(const ModelReport&) const = default;
};

struct EvalReport {
  std::size_t iterations = 0;
  nlohmann::ordered_json config;   ///< echo of seeds, committee, augmentation
  std::vector<ModelReport> rows;  ///< members in committee order, ensemble last

  const ModelReport& row(std::string_view model_id) const;
  const ModelReport& ensemble() const { return rows.back(); }
};

inline constexpr std::string_view kEnsembleId = "ensemble";

struct IterationResult {
  std::vector<MetricSet> members;  ///< aligned with the decision matrix rows
  MetricSet ensemble;
  FusionResult fusion;
};

/// Per-model and fused metrics for one test set. AUC uses scores oriented
/// toward `positive` (binary label spaces only); it is undefined when the
/// test set holds a single class.
IterationResult evaluate_iteration(std::span<const ClassLabel> truth, const DecisionMatrix& d,
                                   const ScoreMatrix& s, ClassLabel positive);

EvalReport aggregate(const std::vector<std::string>& model_ids,
                     std::span<const IterationResult> iterations,
                     nlohmann::ordered_json config);

struct InternalRun {
  EvalReport report;
  std::vector<PredictionRecord> predictions;  ///< every test prediction, with iteration
};

/// Trains the committee on each iteration's training split (augmented when
/// requested, never the test split), predicts the test split, fuses and
/// evaluates. Models are retrained every iteration.
InternalRun run_internal(const DatasetManifest& m, const SplitPlan& plan,
                         const CommitteeConfig& committee, const RunOptions& options);

/// Same evaluation from externally produced predictions. Every model must
/// cover every test image of every iteration; absentees are listed in the
/// CoverageError.
EvalReport run_external(const DatasetManifest& m, const SplitPlan& plan,
                        std::span<const PredictionRecord> records, const RunOptions& options);

}  // namespace ensemble
