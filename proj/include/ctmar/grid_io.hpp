#pragma once

#include <filesystem>
#include <string>

#include "ctmar/core.hpp"

namespace ctmar {

// Grid file format used repo-wide: raw little-endian float32, row-major,
// plus a JSON sidecar {"width","height","unit","kind"} with the same
// basename. A grid stored as "foo.raw" carries its metadata in "foo.json".

struct GridMeta {
    int width = 0;
    int height = 0;
    std::string unit;  // "HU" | "attenuation_per_mm" | "line_integral" | "dimensionless"
    std::string kind;  // "image" | "sinogram" | "mask"
};

void write_grid(const std::filesystem::path& raw_path, const Grid2& g, const GridMeta& meta);
std::pair<Grid2, GridMeta> read_grid(const std::filesystem::path& raw_path);

void write_image(const std::filesystem::path& raw_path, const Image& img);
Image read_image(const std::filesystem::path& raw_path);

void write_sinogram(const std::filesystem::path& raw_path, const Sinogram& s);
Sinogram read_sinogram(const std::filesystem::path& raw_path);

void write_mask(const std::filesystem::path& raw_path, const MetalMask& m);
MetalMask read_mask(const std::filesystem::path& raw_path);

std::string unit_name(ImageUnit u);
std::string unit_name(SinoUnit u);

}  // namespace ctmar
