#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ensemble/labels.hpp"

namespace ensemble {

/// One model's output for one image. Records without an iteration apply to
/// every iteration of a split plan.
struct PredictionRecord {
  std::optional<std::size_t> iteration;
  std::string model_id;
  std::string image_id;
  ClassLabel decision;
  double score = 0.0;  ///< probability of `decision`, in [0,1]

  bool operator==(const PredictionRecord&) const = default;
};

/// Reads a prediction file: header with model_id, image_id, decision, score
/// and an optional iteration column. Rejects scores outside [0,1] (naming
/// model and image), labels outside `space`, and duplicate
/// (iteration, model_id, image_id) keys.
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path,
                                               LabelSpace space = LabelSpace::binary());

/// Concatenates several files (one per model or merged) with the same
/// validation applied across the union.
std::vector<PredictionRecord> read_predictions(std::span<const std::filesystem::path> paths,
                                               LabelSpace space = LabelSpace::binary());

/// Writes records with the iteration column when any record carries one.
/// Scores use 17 significant digits so they read back bit-exactly.
void write_predictions(const std::filesystem::path& path,
                       std::span<const PredictionRecord> records);

}  // namespace ensemble
