#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "ensemble/image.hpp"
#include "ensemble/labels.hpp"

namespace ensemble {

/// Two-class gray images: class +1 brightens left to right, class -1 right to
/// left, with per-pixel Gaussian noise and a per-image brightness offset.
/// Both classes share the same mean intensity, so only the spatial pattern
/// separates them; vertical reflection leaves the pattern intact.
struct SyntheticSpec {
  std::size_t negatives = 100;  ///< label -1
  std::size_t positives = 100;  ///< label +1
  int side = 48;
  double ramp_lo = 60.0;
  double ramp_hi = 200.0;
  double pixel_noise = 20.0;
  double brightness_noise = 10.0;
  std::uint64_t seed = 7;
};

RasterImage synthetic_image(const SyntheticSpec& spec, ClassLabel label, std::size_t index);

/// Writes img_NNNN.png files and manifest.csv into `dir`; returns the
/// manifest path. Negatives come first.
std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                              const SyntheticSpec& spec);

}  // namespace ensemble
