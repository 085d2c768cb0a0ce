#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ensemble/labels.hpp"

namespace ensemble {

struct ManifestEntry {
  std::string image_id;
  std::filesystem::path path;  ///< resolved against the manifest's directory
  ClassLabel label;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  LabelSpace codebook = LabelSpace::binary();

  std::size_t size() const noexcept { return entries.size(); }
  /// Throws CoverageError for an unknown id.
  const ManifestEntry& find(const std::string& image_id) const;
  /// Number of entries per code, in codebook order.
  std::vector<std::size_t> class_counts() const;
};

/// Reads columns image_id, path, label (header required, extra columns
/// ignored). Image files are not touched here; missing files surface when
/// they are first read.
DatasetManifest load_manifest(const std::filesystem::path& path,
                              LabelSpace codebook = LabelSpace::binary());

/// Like load_manifest but the path column is optional; used for ground-truth
/// files that only map image ids to labels.
DatasetManifest load_truth(const std::filesystem::path& path,
                           LabelSpace codebook = LabelSpace::binary());

struct SplitParams {
  int iterations = 5;
  double train_fraction = 0.8;

  void validate() const;
};

struct Split {
  std::vector<std::string> train;  ///< manifest order
  std::vector<std::string> test;   ///< manifest order

  bool operator==(const Split&) const = default;
};

struct SplitPlan {
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  std::vector<Split> iterations;

  bool operator==(const SplitPlan&) const = default;
};

/// Training-set size: round(train_fraction * k), halves rounded up.
std::size_t train_count(std::size_t k, double train_fraction);

/// Repeated stratified random holdout. Each class is split in proportion to
/// the overall train count with largest-remainder rounding (ties to the
/// lower label code), then members are drawn by a seeded shuffle; iteration
/// r uses Rng::stream(seed, {r}). Every class must have at least two images
/// so that it appears on both sides.
SplitPlan make_splits(const DatasetManifest& m, const SplitParams& params,
                      std::uint64_t seed);

void save_split_plan(const std::filesystem::path& path, const SplitPlan& plan);
SplitPlan load_split_plan(const std::filesystem::path& path);

}  // namespace ensemble
