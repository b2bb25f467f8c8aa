#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ctmar/core.hpp"
#include "ctmar/metrics.hpp"

namespace ctmar {

/// 8-bit grayscale PNG, row-major pixels, deterministic output bytes.
void write_png_gray8(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels,
                     int width, int height);

/// Windowed 8-bit preview of an HU image.
void write_png_preview(const std::filesystem::path& path, const Image& img_hu,
                       const HuWindow& w = {});

}  // namespace ctmar
