#include "ensemble/image.hpp"

#include <string>

#include "ensemble/error.hpp"

namespace ensemble {
namespace {

void check_dims(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw DomainError("image dimensions must be positive, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw FormatError("unsupported channel count " + std::to_string(channels));
  }
}

}  // namespace

RasterImage::RasterImage(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, 0);
}

RasterImage::RasterImage(int width, int height, int channels,
                         std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height, channels);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw DimensionError("pixel buffer has " + std::to_string(data_.size()) +
                         " bytes, expected " +
                         std::to_string(static_cast<std::size_t>(width) * height *
                                        channels));
  }
}

}  // namespace ensemble
