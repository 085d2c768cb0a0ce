#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ensemble/image.hpp"
#include "ensemble/rng.hpp"

namespace ensemble {

/// Bilinear resize with half-pixel-centre alignment and edge clamping.
/// Output samples are rounded half away from zero, so a 2x2 checkerboard
/// (0,255;255,0) shrinks to a single 128. Same-size resize is the identity.
RasterImage resize(const RasterImage& img, int target_w, int target_h);

/// Replicates gray into three channels; RGB passes through unchanged.
RasterImage to_rgb(const RasterImage& img);

/// Luma with BT.601 weights (0.299 R + 0.587 G + 0.114 B), rounded.
RasterImage to_gray(const RasterImage& img);

/// Flips rows top to bottom.
RasterImage flip_vertical(const RasterImage& img);

struct AugmentationConfig {
  double reflect_probability = 0.5;
  double translate_lo = -30.0;  ///< pixels, both axes
  double translate_hi = 30.0;
  double scale_lo = 0.9;  ///< factor, both axes
  double scale_hi = 1.1;
  std::uint64_t seed = 0;

  /// Throws DomainError when a range is malformed.
  void validate() const;

  /// Every transform disabled.
  static AugmentationConfig identity(std::uint64_t seed = 0);
};

/// Random draws behind one augmentation; exposed for tests and debugging.
struct AugmentationDraw {
  bool reflect = false;
  double dx = 0.0, dy = 0.0;
  double sx = 1.0, sy = 1.0;
};

/// Consumes exactly five uniforms from `rng`: reflect, dx, dy, sx, sy.
AugmentationDraw draw_augmentation(const AugmentationConfig& cfg, Rng& rng);

/// Vertical reflection, then translation, then scaling about the image
/// centre, resampled bilinearly in one pass. Samples falling outside the
/// frame are black; dimensions are preserved.
RasterImage apply_augmentation(const RasterImage& img, const AugmentationDraw& draw);

RasterImage augment(const RasterImage& img, const AugmentationConfig& cfg, Rng& rng);

/// Augments image i with Rng::stream(cfg.seed, {stream_base, i}), in parallel.
std::vector<RasterImage> augment_batch(std::span<const RasterImage> images,
                                       const AugmentationConfig& cfg,
                                       std::uint64_t stream_base);

/// Sequential reference for augment_batch.
std::vector<RasterImage> augment_batch_serial(std::span<const RasterImage> images,
                                              const AugmentationConfig& cfg,
                                              std::uint64_t stream_base);

}  // namespace ensemble
