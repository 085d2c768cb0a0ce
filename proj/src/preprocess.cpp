#include "ensemble/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ensemble/error.hpp"

namespace ensemble {
namespace {

void require_image(const RasterImage& img) {
  if (img.empty()) throw DomainError("empty image");
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

// Bilinear sample at continuous pixel coordinates (u, v); coordinates are
// clamped to the pixel-centre grid, so off-grid edges repeat the border.
double sample(const RasterImage& img, double u, double v, int c) {
  const int w = img.width(), h = img.height();
  u = std::clamp(u, 0.0, static_cast<double>(w - 1));
  v = std::clamp(v, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(u), y0 = static_cast<int>(v);
  const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const double fx = u - x0, fy = v - y0;
  const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
  const double bottom = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
  return (1.0 - fy) * top + fy * bottom;
}

}  // namespace

RasterImage resize(const RasterImage& img, int target_w, int target_h) {
  require_image(img);
  if (target_w < 1 || target_h < 1) {
    throw DomainError("resize target must be at least 1x1, got " +
                      std::to_string(target_w) + "x" + std::to_string(target_h));
  }
  if (target_w == img.width() && target_h == img.height()) return img;

  RasterImage out(target_w, target_h, img.channels());
  const double rx = static_cast<double>(img.width()) / target_w;
  const double ry = static_cast<double>(img.height()) / target_h;
  for (int y = 0; y < target_h; ++y) {
    const double v = (y + 0.5) * ry - 0.5;
    for (int x = 0; x < target_w; ++x) {
      const double u = (x + 0.5) * rx - 0.5;
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = to_byte(sample(img, u, v, c));
    }
  }
  return out;
}

RasterImage to_rgb(const RasterImage& img) {
  require_image(img);
  if (img.channels() == 3) return img;
  if (img.channels() != 1) {
    throw FormatError("to_rgb expects 1 or 3 channels, got " +
                      std::to_string(img.channels()));
  }
  RasterImage out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto g = img.at(x, y);
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = g;
    }
  }
  return out;
}

RasterImage to_gray(const RasterImage& img) {
  require_image(img);
  if (img.channels() == 1) return img;
  RasterImage out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = to_byte(0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                             0.114 * img.at(x, y, 2));
    }
  }
  return out;
}

RasterImage flip_vertical(const RasterImage& img) {
  require_image(img);
  RasterImage out = img;
  const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  for (int y = 0; y < img.height(); ++y) {
    std::copy_n(img.data().begin() + y * stride, stride,
                out.data().begin() + (img.height() - 1 - y) * stride);
  }
  return out;
}

void AugmentationConfig::validate() const {
  if (!(reflect_probability >= 0.0 && reflect_probability <= 1.0)) {
    throw DomainError("reflect probability must lie in [0,1]");
  }
  if (!std::isfinite(translate_lo) || !std::isfinite(translate_hi) ||
      translate_lo > translate_hi) {
    throw DomainError("translation range must be finite and ordered");
  }
  if (!(scale_lo > 0.0) || !std::isfinite(scale_hi) || scale_lo > scale_hi) {
    throw DomainError("scale range must satisfy 0 < lo <= hi");
  }
}

AugmentationConfig AugmentationConfig::identity(std::uint64_t seed) {
  return {0.0, 0.0, 0.0, 1.0, 1.0, seed};
}

AugmentationDraw draw_augmentation(const AugmentationConfig& cfg, Rng& rng) {
  AugmentationDraw d;
  d.reflect = rng.bernoulli(cfg.reflect_probability);
  d.dx = rng.uniform(cfg.translate_lo, cfg.translate_hi);
  d.dy = rng.uniform(cfg.translate_lo, cfg.translate_hi);
  d.sx = rng.uniform(cfg.scale_lo, cfg.scale_hi);
  d.sy = rng.uniform(cfg.scale_lo, cfg.scale_hi);
  return d;
}

RasterImage apply_augmentation(const RasterImage& img, const AugmentationDraw& d) {
  require_image(img);
  const int w = img.width(), h = img.height();
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  RasterImage out(w, h, img.channels());
  // Inverse map: undo scaling, then translation, then reflection.
  for (int y = 0; y < h; ++y) {
    double v = (y - cy) / d.sy + cy - d.dy;
    if (d.reflect) v = (h - 1) - v;
    if (v < -0.5 || v > h - 0.5) continue;
    for (int x = 0; x < w; ++x) {
      const double u = (x - cx) / d.sx + cx - d.dx;
      if (u < -0.5 || u > w - 0.5) continue;
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = to_byte(sample(img, u, v, c));
    }
  }
  return out;
}

RasterImage augment(const RasterImage& img, const AugmentationConfig& cfg, Rng& rng) {
  cfg.validate();
  return apply_augmentation(img, draw_augmentation(cfg, rng));
}

std::vector<RasterImage> augment_batch_serial(std::span<const RasterImage> images,
                                              const AugmentationConfig& cfg,
                                              std::uint64_t stream_base) {
  cfg.validate();
  std::vector<RasterImage> out(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    Rng rng = Rng::stream(cfg.seed, {stream_base, i});
    out[i] = augment(images[i], cfg, rng);
  }
  return out;
}

std::vector<RasterImage> augment_batch(std::span<const RasterImage> images,
                                       const AugmentationConfig& cfg,
                                       std::uint64_t stream_base) {
  cfg.validate();
  for (const auto& img : images) require_image(img);
  std::vector<RasterImage> out(images.size());
  const auto n = static_cast<std::ptrdiff_t>(images.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    Rng rng = Rng::stream(cfg.seed, {stream_base, idx});
    out[idx] = apply_augmentation(images[idx], draw_augmentation(cfg, rng));
  }
  return out;
}

}  // namespace ensemble
