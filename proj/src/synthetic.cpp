#include "ensemble/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ensemble/error.hpp"
#include "ensemble/image_io.hpp"
#include "ensemble/rng.hpp"

namespace ensemble {
namespace {

// Box-Muller on the portable uniform stream.
double gaussian(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

RasterImage synthetic_image(const SyntheticSpec& spec, ClassLabel label, std::size_t index) {
  Rng rng = Rng::stream(spec.seed, {static_cast<std::uint64_t>(label.code + 2), index});
  RasterImage img(spec.side, spec.side, 1);
  const double offset = spec.brightness_noise * gaussian(rng);
  for (int y = 0; y < spec.side; ++y) {
    for (int x = 0; x < spec.side; ++x) {
      double t = spec.side > 1 ? static_cast<double>(x) / (spec.side - 1) : 0.5;
      if (label == kNegativeOne) t = 1.0 - t;
      const double v = spec.ramp_lo + (spec.ramp_hi - spec.ramp_lo) * t + offset +
                       spec.pixel_noise * gaussian(rng);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
  }
  return img;
}

std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                              const SyntheticSpec& spec) {
  std::filesystem::create_directories(dir);
  const auto manifest = dir / "manifest.csv";
  std::ofstream out(manifest);
  if (!out) throw IoError("cannot write '" + manifest.string() + "'");
  out << "image_id,path,label\n";
  std::size_t n = 0;
  auto emit = [&](ClassLabel label, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i, ++n) {
      char name[32];
      std::snprintf(name, sizeof name, "img_%04zu", n);
      write_png(dir / (std::string(name) + ".png"), synthetic_image(spec, label, i));
      out << name << ',' << name << ".png," << label.code << '\n';
    }
  };
  emit(kNegativeOne, spec.negatives);
  emit(kPositiveOne, spec.positives);
  if (!out) throw IoError("failed writing '" + manifest.string() + "'");
  return manifest;
}

}  // namespace ensemble
