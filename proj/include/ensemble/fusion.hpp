#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ensemble/labels.hpp"

namespace ensemble {

/// n x k matrix of class votes: one row per committee member, one column per
/// image. Stored row-major.
class DecisionMatrix {
 public:
  DecisionMatrix(std::vector<std::string> model_ids,
                 std::vector<std::string> image_ids,
                 std::vector<ClassLabel> entries,
                 LabelSpace space = LabelSpace::binary());

  std::size_t models() const noexcept { return model_ids_.size(); }
  std::size_t images() const noexcept { return image_ids_.size(); }
  const std::vector<std::string>& model_ids() const noexcept { return model_ids_; }
  const std::vector<std::string>& image_ids() const noexcept { return image_ids_; }
  const LabelSpace& label_space() const noexcept { return space_; }

  ClassLabel at(std::size_t model, std::size_t image) const {
    return entries_[model * images() + image];
  }
  std::span<const ClassLabel> row(std::size_t model) const {
    return {entries_.data() + model * images(), images()};
  }

 private:
  std::vector<std::string> model_ids_;
  std::vector<std::string> image_ids_;
  std::vector<ClassLabel> entries_;
  LabelSpace space_;
};

/// Posterior probabilities aligned entry-for-entry with a DecisionMatrix:
/// entry (m, i) is model m's probability for the class it decided on image i.
class ScoreMatrix {
 public:
  ScoreMatrix(std::vector<std::string> model_ids,
              std::vector<std::string> image_ids, std::vector<double> entries);

  std::size_t models() const noexcept { return model_ids_.size(); }
  std::size_t images() const noexcept { return image_ids_.size(); }
  const std::vector<std::string>& model_ids() const noexcept { return model_ids_; }
  const std::vector<std::string>& image_ids() const noexcept { return image_ids_; }

  double at(std::size_t model, std::size_t image) const {
    return entries_[model * images() + image];
  }
  std::span<const double> row(std::size_t model) const {
    return {entries_.data() + model * images(), images()};
  }

 private:
  std::vector<std::string> model_ids_;
  std::vector<std::string> image_ids_;
  std::vector<double> entries_;
};

/// Throws PairingError unless shapes and ids match exactly.
void check_paired(const DecisionMatrix& d, const ScoreMatrix& s);

struct ColumnMode {
  ClassLabel label;
  std::vector<std::size_t> voters;  ///< ascending positions holding `label`
};

/// Most frequent label of one column and the positions that voted for it.
/// Frequency ties go to the label whose voters have the higher mean score,
/// then to the lower label code.
ColumnMode column_mode(std::span<const ClassLabel> decisions,
                       std::span<const double> scores);

struct FusionResult {
  std::vector<std::string> image_ids;
  std::vector<ClassLabel> dm;        ///< modal decision per image
  std::vector<double> ds;            ///< mean score over the modal voters
  std::vector<std::size_t> support;  ///< number of modal voters
};

/// Mode-based fusion, columns processed in parallel.
FusionResult fuse(const DecisionMatrix& d, const ScoreMatrix& s);

/// Sequential reference for `fuse`; results are bit-identical.
FusionResult fuse_serial(const DecisionMatrix& d, const ScoreMatrix& s);

struct GroupedModeInput {
  double lower = 0.0;        ///< lower limit of the modal class
  double width = 1.0;        ///< class-interval width, > 0
  double modal_freq = 0.0;   ///< f1
  double before_freq = 0.0;  ///< f0, class preceding the modal class
  double after_freq = 0.0;   ///< f2, class following the modal class
};

/// Mode estimate for interval-binned frequencies:
/// lower + (f1 - f0) / (2 f1 - f0 - f2) * width.
double grouped_mode(const GroupedModeInput& g);

}  // namespace ensemble
