#include "ctmar/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace ctmar {

static_assert(std::endian::native == std::endian::little,
              "grid file format assumes a little-endian host");

namespace {

std::filesystem::path sidecar_path(std::filesystem::path raw) {
    raw.replace_extension(".json");
    return raw;
}

}  // namespace

void write_grid(const std::filesystem::path& raw_path, const Grid2& g, const GridMeta& meta) {
    if (meta.width != g.cols() || meta.height != g.rows())
        throw DimensionMismatch("write_grid: metadata does not match grid shape");

    std::vector<float> buf(g.size());
    const double* src = g.data();
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(src[i]);

    std::ofstream raw(raw_path, std::ios::binary | std::ios::trunc);
    if (!raw) throw DataError("write_grid: cannot open " + raw_path.string());
    raw.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!raw) throw DataError("write_grid: short write to " + raw_path.string());

    nlohmann::json j;
    j["width"] = meta.width;
    j["height"] = meta.height;
    j["unit"] = meta.unit;
    j["kind"] = meta.kind;
    std::ofstream side(sidecar_path(raw_path), std::ios::trunc);
    if (!side) throw DataError("write_grid: cannot open sidecar for " + raw_path.string());
    side << j.dump(2) << "\n";
}

std::pair<Grid2, GridMeta> read_grid(const std::filesystem::path& raw_path) {
    std::ifstream side(sidecar_path(raw_path));
    if (!side) throw DataError("read_grid: missing sidecar for " + raw_path.string());
    nlohmann::json j;
    try {
        side >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("read_grid: bad sidecar for " + raw_path.string() + ": " + e.what());
    }
    GridMeta meta;
    try {
        meta.width = j.at("width").get<int>();
        meta.height = j.at("height").get<int>();
        meta.unit = j.at("unit").get<std::string>();
        meta.kind = j.at("kind").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("read_grid: sidecar fields missing in " + raw_path.string() + ": " + e.what());
    }
    if (meta.width < 1 || meta.height < 1)
        throw DataError("read_grid: bad dimensions in sidecar of " + raw_path.string());

    const size_t n = static_cast<size_t>(meta.width) * meta.height;
    std::ifstream raw(raw_path, std::ios::binary);
    if (!raw) throw DataError("read_grid: cannot open " + raw_path.string());
    std::vector<float> buf(n);
    raw.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(float)));
    if (raw.gcount() != static_cast<std::streamsize>(n * sizeof(float)))
        throw DataError("read_grid: raw file size does not match sidecar: " + raw_path.string());

    Grid2 g(meta.height, meta.width);
    double* dst = g.data();
    for (size_t i = 0; i < n; ++i) dst[i] = static_cast<double>(buf[i]);
    return {std::move(g), std::move(meta)};
}

std::string unit_name(ImageUnit u) {
    return u == ImageUnit::HU ? "HU" : "attenuation_per_mm";
}

std::string unit_name(SinoUnit u) {
    return u == SinoUnit::LineIntegral ? "line_integral" : "dimensionless";
}

namespace {

ImageUnit parse_image_unit(const std::string& s, const std::filesystem::path& p) {
    if (s == "HU") return ImageUnit::HU;
    if (s == "attenuation_per_mm") return ImageUnit::Attenuation;
    throw UnitMismatch("read_image: unexpected unit '" + s + "' in " + p.string());
}

SinoUnit parse_sino_unit(const std::string& s, const std::filesystem::path& p) {
    if (s == "line_integral") return SinoUnit::LineIntegral;
    if (s == "dimensionless") return SinoUnit::Dimensionless;
    throw UnitMismatch("read_sinogram: unexpected unit '" + s + "' in " + p.string());
}

}  // namespace

void write_image(const std::filesystem::path& raw_path, const Image& img) {
    write_grid(raw_path, img.grid,
               GridMeta{img.width(), img.height(), unit_name(img.unit), "image"});
}

Image read_image(const std::filesystem::path& raw_path) {
    auto [g, meta] = read_grid(raw_path);
    if (meta.kind != "image")
        throw DataError("read_image: '" + raw_path.string() + "' is a " + meta.kind);
    return Image{std::move(g), parse_image_unit(meta.unit, raw_path)};
}

void write_sinogram(const std::filesystem::path& raw_path, const Sinogram& s) {
    write_grid(raw_path, s.grid,
               GridMeta{s.n_detectors(), s.n_angles(), unit_name(s.unit), "sinogram"});
}

Sinogram read_sinogram(const std::filesystem::path& raw_path) {
    auto [g, meta] = read_grid(raw_path);
    if (meta.kind != "sinogram")
        throw DataError("read_sinogram: '" + raw_path.string() + "' is a " + meta.kind);
    return Sinogram{std::move(g), parse_sino_unit(meta.unit, raw_path)};
}

void write_mask(const std::filesystem::path& raw_path, const MetalMask& m) {
    write_grid(raw_path, m.grid,
               GridMeta{m.grid.cols(), m.grid.rows(), "dimensionless", "mask"});
}

MetalMask read_mask(const std::filesystem::path& raw_path) {
    auto [g, meta] = read_grid(raw_path);
    if (meta.kind != "mask")
        throw DataError("read_mask: '" + raw_path.string() + "' is a " + meta.kind);
    return MetalMask::from_grid(std::move(g));
}

}  // namespace ctmar
