#include "ctmar/png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace ctmar {

namespace {

void be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void chunk(std::vector<std::uint8_t>& out, const char type[4],
           const std::vector<std::uint8_t>& payload) {
    be32(out, static_cast<std::uint32_t>(payload.size()));
    const size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
    be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png_gray8(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels,
                     int width, int height) {
    if (width < 1 || height < 1 ||
        pixels.size() != static_cast<size_t>(width) * static_cast<size_t>(height))
        throw DimensionMismatch("write_png_gray8: pixel buffer does not match dimensions");

    // filter byte 0 in front of every scanline
    std::vector<std::uint8_t> raw(static_cast<size_t>(height) * (width + 1));
    for (int r = 0; r < height; ++r) {
        raw[static_cast<size_t>(r) * (width + 1)] = 0;
        std::memcpy(raw.data() + static_cast<size_t>(r) * (width + 1) + 1,
                    pixels.data() + static_cast<size_t>(r) * width, width);
    }
    uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_len);
    if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw DataError("write_png_gray8: deflate failed");
    comp.resize(comp_len);

    std::vector<std::uint8_t> out;
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    out.insert(out.end(), sig, sig + 8);

    std::vector<std::uint8_t> ihdr;
    be32(ihdr, static_cast<std::uint32_t>(width));
    be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // deflate
    ihdr.push_back(0);  // adaptive filters
    ihdr.push_back(0);  // no interlace
    chunk(out, "IHDR", ihdr);
    chunk(out, "IDAT", comp);
    chunk(out, "IEND", {});

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("write_png_gray8: cannot open " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("write_png_gray8: short write to " + path.string());
}

void write_png_preview(const std::filesystem::path& path, const Image& img_hu,
                       const HuWindow& w) {
    const Image win = window_image(img_hu, w);
    std::vector<std::uint8_t> px(win.grid.size());
    const double* src = win.grid.data();
    for (size_t i = 0; i < px.size(); ++i)
        px[i] = static_cast<std::uint8_t>(std::lround(src[i] * 255.0));
    write_png_gray8(path, px, win.width(), win.height());
}

}  // namespace ctmar
