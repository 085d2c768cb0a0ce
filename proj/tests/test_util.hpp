#pragma once

// Shared test helpers and independent oracles. Nothing here calls into the
// library code it is used to check.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <unistd.h>

#include "ensemble/labels.hpp"
#include "ensemble/rng.hpp"

namespace ensemble::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ensemble_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::string> ids(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

/// Sign of the column sum; defined for odd n.
inline int majority_oracle(const std::vector<int>& column) {
  int sum = 0;
  for (int v : column) sum += v;
  return sum > 0 ? 1 : -1;
}

/// Probability a random positive outscores a random negative, ties 1/2.
inline double pairwise_auc_oracle(const std::vector<int>& truth, const std::vector<double>& s,
                                  int positive) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != positive) continue;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (truth[j] == positive) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

struct Tally {
  long tp = 0, fp = 0, tn = 0, fn = 0;
};

inline Tally tally_oracle(const std::vector<int>& truth, const std::vector<int>& pred,
                          int positive) {
  Tally t;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == positive && pred[i] == positive) ++t.tp;
    if (truth[i] != positive && pred[i] == positive) ++t.fp;
    if (truth[i] != positive && pred[i] != positive) ++t.tn;
    if (truth[i] == positive && pred[i] != positive) ++t.fn;
  }
  return t;
}

/// Random score in [0,1] from a coarse grid when `coarse`, so ties are common.
inline double random_score(Rng& rng, bool coarse) {
  return coarse ? static_cast<double>(rng.below(5)) / 4.0 : rng.uniform();
}

inline int random_binary(Rng& rng) { return rng.bernoulli(0.5) ? 1 : -1; }

}  // namespace ensemble::testing
