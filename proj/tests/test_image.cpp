#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "mvrp/image.hpp"
#include "mvrp/rng.hpp"

using namespace mvrp;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("v_channel is the componentwise max") {
    RgbImage img;
    img.width = 3;
    img.height = 1;
    img.pixels = {255, 0, 0, 10, 10, 10, 30, 200, 90};
    const GrayImage g = v_channel(img);
    REQUIRE(g.width == 3);
    REQUIRE(g.height == 1);
    CHECK(g.pixels[0] == 255);
    CHECK(g.pixels[1] == 10);
    CHECK(g.pixels[2] == 200);
}

TEST_CASE("v_channel of an equal-channel image reproduces the gray values") {
    RgbImage img;
    img.width = 256;
    img.height = 1;
    for (int g = 0; g < 256; ++g) {
        img.pixels.push_back(static_cast<std::uint8_t>(g));
        img.pixels.push_back(static_cast<std::uint8_t>(g));
        img.pixels.push_back(static_cast<std::uint8_t>(g));
    }
    const GrayImage out = v_channel(img);
    for (int g = 0; g < 256; ++g) CHECK(out.pixels[static_cast<size_t>(g)] == g);
}

TEST_CASE("write_image emits the exact netpbm bytes") {
    SECTION("minimal 1x1 gray image") {
        const auto path = temp_file("mvrp_min.pgm");
        write_image(GrayImage{1, 1, {0}}, path.string());
        const std::string bytes = read_bytes(path);
        REQUIRE(bytes.size() == 12);
        CHECK(bytes == std::string("P5\n1 1\n255\n\0", 12));
    }

    SECTION("payload is row-major") {
        const auto path = temp_file("mvrp_row.pgm");
        write_image(GrayImage{2, 1, {0, 255}}, path.string());
        const std::string bytes = read_bytes(path);
        REQUIRE(bytes.size() == 13);  // "P5\n2 1\n255\n" + 2 payload bytes
        CHECK(static_cast<unsigned char>(bytes[11]) == 0x00);
        CHECK(static_cast<unsigned char>(bytes[12]) == 0xFF);
    }
}

TEST_CASE("read_image parses headers and payloads") {
    SECTION("single pixel") {
        const auto path = temp_file("mvrp_px.pgm");
        write_bytes(path, std::string("P5\n1 1\n255\n\x7F", 12));
        const auto img = read_image(path.string());
        const auto& g = std::get<GrayImage>(img);
        REQUIRE(g.width == 1);
        REQUIRE(g.height == 1);
        CHECK(g.pixels[0] == 127);
    }

    SECTION("header comments are skipped") {
        const auto plain = temp_file("mvrp_plain.pgm");
        const auto commented = temp_file("mvrp_comment.pgm");
        write_bytes(plain, std::string("P5\n2 1\n255\nAB", 13));
        write_bytes(commented, std::string("P5\n# produced by a test\n2 1 # dims\n255\nAB", 41));
        const auto a = std::get<GrayImage>(read_image(plain.string()));
        const auto b = std::get<GrayImage>(read_image(commented.string()));
        CHECK(a.pixels == b.pixels);
        CHECK(a.width == b.width);
    }

    SECTION("malformed files are rejected") {
        const auto bad_magic = temp_file("mvrp_badmagic.pgm");
        write_bytes(bad_magic, "P2\n1 1\n255\n0");
        CHECK_THROWS_AS(read_image(bad_magic.string()), FormatError);

        const auto bad_maxval = temp_file("mvrp_badmax.pgm");
        write_bytes(bad_maxval, std::string("P5\n1 1\n65535\n\x00\x00", 15));
        CHECK_THROWS_AS(read_image(bad_maxval.string()), FormatError);

        const auto truncated = temp_file("mvrp_trunc.pgm");
        write_bytes(truncated, "P5\n4 4\n255\nab");
        CHECK_THROWS_AS(read_image(truncated.string()), FormatError);

        CHECK_THROWS_AS(read_image(temp_file("mvrp_absent.pgm").string()), IoError);
    }
}

TEST_CASE("read after write round-trips random images") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 1 + rng.uniform_int(64);
        const int h = 1 + rng.uniform_int(64);

        GrayImage gray;
        gray.width = w;
        gray.height = h;
        gray.pixels.resize(static_cast<size_t>(w) * h);
        for (auto& p : gray.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(256));
        const auto gpath = temp_file("mvrp_rt.pgm");
        write_image(gray, gpath.string());
        const auto gback = std::get<GrayImage>(read_image(gpath.string()));
        CHECK(gback.width == w);
        CHECK(gback.height == h);
        CHECK(gback.pixels == gray.pixels);

        RgbImage rgb;
        rgb.width = w;
        rgb.height = h;
        rgb.pixels.resize(static_cast<size_t>(w) * h * 3);
        for (auto& p : rgb.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(256));
        const auto cpath = temp_file("mvrp_rt.ppm");
        write_image(rgb, cpath.string());
        const auto cback = std::get<RgbImage>(read_image(cpath.string()));
        CHECK(cback.pixels == rgb.pixels);
    }

    SECTION("one full-size frame") {
        SplitMix64 big(78);
        RgbImage rgb;
        rgb.width = 512;
        rgb.height = 384;
        rgb.pixels.resize(512 * 384 * 3);
        for (auto& p : rgb.pixels) p = static_cast<std::uint8_t>(big.uniform_int(256));
        const auto path = temp_file("mvrp_full.ppm");
        write_image(rgb, path.string());
        CHECK(std::get<RgbImage>(read_image(path.string())).pixels == rgb.pixels);
    }
}
