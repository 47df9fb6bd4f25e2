#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "mvrp/errors.hpp"

namespace mvrp {

/// 8-bit grayscale image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // width * height

    std::uint8_t at(int u, int v) const { return pixels[static_cast<size_t>(v) * width + u]; }
    std::uint8_t& at(int u, int v) { return pixels[static_cast<size_t>(v) * width + u]; }
};

/// 8-bit RGB image, row-major interleaved triples.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // 3 * width * height
};

inline GrayImage make_gray(int width, int height, std::uint8_t fill = 0) {
    return {width, height,
            std::vector<std::uint8_t>(static_cast<size_t>(width) * height, fill)};
}

/// HSV value channel: per-pixel max of the color components.
inline GrayImage v_channel(const RgbImage& img) {
    GrayImage out;
    out.width = img.width;
    out.height = img.height;
    out.pixels.resize(static_cast<size_t>(img.width) * img.height);
    for (size_t i = 0; i < out.pixels.size(); ++i) {
        const std::uint8_t r = img.pixels[3 * i];
        const std::uint8_t g = img.pixels[3 * i + 1];
        const std::uint8_t b = img.pixels[3 * i + 2];
        out.pixels[i] = std::max(r, std::max(g, b));
    }
    return out;
}

using AnyImage = std::variant<GrayImage, RgbImage>;

namespace detail {

// Reads one header integer, skipping whitespace and `#` comments.
inline int pnm_header_int(const std::string& buf, size_t& pos, const std::string& path) {
    for (;;) {
        while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
        if (pos < buf.size() && buf[pos] == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    if (pos >= buf.size() || !std::isdigit(static_cast<unsigned char>(buf[pos]))) {
        throw FormatError(path + ": malformed netpbm header");
    }
    long value = 0;
    while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) {
        value = value * 10 + (buf[pos] - '0');
        if (value > 1 << 30) throw FormatError(path + ": header value out of range");
        ++pos;
    }
    return static_cast<int>(value);
}

}  // namespace detail

/// Reads a binary PGM (`P5`) into a GrayImage or a binary PPM (`P6`) into an
/// RgbImage. Only maxval 255 is accepted.
inline AnyImage read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open image: " + path);
    }
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '5' && buf[1] != '6')) {
        throw FormatError(path + ": not a binary PGM/PPM file");
    }
    const bool rgb = buf[1] == '6';
    size_t pos = 2;
    const int width = detail::pnm_header_int(buf, pos, path);
    const int height = detail::pnm_header_int(buf, pos, path);
    const int maxval = detail::pnm_header_int(buf, pos, path);
    if (width <= 0 || height <= 0) {
        throw FormatError(path + ": non-positive image dimensions");
    }
    if (maxval != 255) {
        throw FormatError(path + ": unsupported maxval " + std::to_string(maxval));
    }
    if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos]))) {
        throw FormatError(path + ": missing whitespace after header");
    }
    ++pos;  // exactly one whitespace byte separates header and payload
    const size_t count = static_cast<size_t>(width) * height * (rgb ? 3 : 1);
    if (buf.size() - pos < count) {
        throw FormatError(path + ": truncated pixel payload");
    }
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(buf.data() + pos);
    if (rgb) {
        RgbImage img;
        img.width = width;
        img.height = height;
        img.pixels.assign(bytes, bytes + count);
        return img;
    }
    GrayImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(bytes, bytes + count);
    return img;
}

inline void write_image(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

inline void write_image(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

}  // namespace mvrp
