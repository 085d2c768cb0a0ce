#include "ensemble/labels.hpp"

#include <string>

#include "ensemble/error.hpp"

namespace ensemble {

LabelSpace LabelSpace::multiclass(int count) {
  if (count < 2) {
    throw LabelError("multiclass label space needs at least 2 classes, got " +
                     std::to_string(count));
  }
  return LabelSpace{count};
}

bool LabelSpace::contains(ClassLabel label) const noexcept {
  if (is_binary()) return label.code == -1 || label.code == 1;
  return label.code >= 0 && label.code < count_;
}

void LabelSpace::check(ClassLabel label) const {
  if (contains(label)) return;
  if (is_binary()) {
    throw LabelError("label " + std::to_string(label.code) +
                     " is not a binary code (-1 or +1)");
  }
  throw LabelError("label " + std::to_string(label.code) + " outside 0.." +
                   std::to_string(count_ - 1));
}

std::vector<ClassLabel> LabelSpace::codes() const {
  if (is_binary()) return {kNegativeOne, kPositiveOne};
  std::vector<ClassLabel> out;
  for (int c = 0; c < count_; ++c) out.push_back({c});
  return out;
}

}  // namespace ensemble
