#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace ensemble {

/// Integer class code. Binary problems use -1 (COVID, positive by default)
/// and +1 (not-COVID); multiclass problems use 0..count-1.
struct ClassLabel {
  int code = 0;

  constexpr auto operator<=>(const ClassLabel&) const = default;
};

inline constexpr ClassLabel kNegativeOne{-1};
inline constexpr ClassLabel kPositiveOne{+1};

/// The set of legal codes for one matrix or dataset. Binary and multiclass
/// codes never mix.
class LabelSpace {
 public:
  static constexpr LabelSpace binary() { return LabelSpace{0}; }
  /// Codes 0..count-1; count >= 2.
  static LabelSpace multiclass(int count);

  bool is_binary() const noexcept { return count_ == 0; }
  int class_count() const noexcept { return is_binary() ? 2 : count_; }
  bool contains(ClassLabel label) const noexcept;
  /// Throws LabelError naming the offending code.
  void check(ClassLabel label) const;
  /// Legal codes in ascending order.
  std::vector<ClassLabel> codes() const;

  bool operator==(const LabelSpace&) const = default;

 private:
  constexpr explicit LabelSpace(int count) : count_(count) {}
  int count_;
};

}  // namespace ensemble
