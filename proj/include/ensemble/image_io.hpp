#pragma once

#include <filesystem>

#include "ensemble/image.hpp"

namespace ensemble {

/// Decodes PNG or JPEG (detected from the file signature) into 8-bit gray or
/// RGB. Alpha is dropped. Throws IoError / FormatError.
RasterImage read_image(const std::filesystem::path& path);

/// Writes an 8-bit gray or RGB PNG.
void write_png(const std::filesystem::path& path, const RasterImage& img);

}  // namespace ensemble
