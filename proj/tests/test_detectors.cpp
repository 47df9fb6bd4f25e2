#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "mvrp/detectors.hpp"
#include "mvrp/geometry.hpp"
#include "mvrp/rng.hpp"
#include "mvrp/scenegen.hpp"

using namespace mvrp;

namespace {

// ---------------------------------------------------------------------------
// Independent scalar oracles (separate code paths from the detectors).
// ---------------------------------------------------------------------------

double harris_response_oracle(const GrayImage& img, int u, int v, const HarrisConfig& cfg) {
    static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    static const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    auto grad = [&](int x, int y, const int k[3][3]) {
        double s = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) s += k[dy + 1][dx + 1] * double(img.at(x + dx, y + dy));
        return s;
    };
    const int wr = cfg.window_radius;
    double wsum = 0.0, a = 0.0, b = 0.0, c = 0.0;
    for (int dy = -wr; dy <= wr; ++dy)
        for (int dx = -wr; dx <= wr; ++dx)
            wsum += std::exp(-(dx * dx + dy * dy) / (2.0 * cfg.gaussian_sigma * cfg.gaussian_sigma));
    for (int dy = -wr; dy <= wr; ++dy) {
        for (int dx = -wr; dx <= wr; ++dx) {
            const double w =
                std::exp(-(dx * dx + dy * dy) / (2.0 * cfg.gaussian_sigma * cfg.gaussian_sigma)) /
                wsum;
            const double gx = grad(u + dx, v + dy, kx);
            const double gy = grad(u + dx, v + dy, ky);
            a += w * gx * gx;
            b += w * gy * gy;
            c += w * gx * gy;
        }
    }
    return (a * b - c * c) - cfg.k_h * (a + b) * (a + b);
}

double susan_response_oracle(const GrayImage& img, int u, int v, const SusanConfig& cfg) {
    const int half37[7] = {1, 2, 3, 3, 3, 2, 1};
    double n = 0.0;
    const int nucleus = img.at(u, v);
    const int reach = cfg.mask == SusanMask::Mask37 ? 3 : 2;
    for (int dy = -reach; dy <= reach; ++dy) {
        const int hw = cfg.mask == SusanMask::Mask37 ? half37[dy + 3] : 2;
        for (int dx = -hw; dx <= hw; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const double d = (double(img.at(u + dx, v + dy)) - nucleus) / cfg.t;
            n += std::exp(-std::pow(d, 6.0));
        }
    }
    const double g = cfg.effective_g();
    return n < g ? g - n : 0.0;
}

// Literal rotation-scan segment test.
bool fast_run_oracle(std::uint16_t bits, int t_f) {
    for (int s = 0; s < 16; ++s) {
        int run = 0;
        while (run < 16 && ((bits >> ((s + run) % 16)) & 1u)) ++run;
        if (run >= t_f) return true;
    }
    return false;
}

GrayImage bright_square(int size, int x0, int y0, int side, std::uint8_t bg = 0,
                        std::uint8_t fg = 255) {
    GrayImage img = make_gray(size, size, bg);
    for (int v = y0; v < y0 + side; ++v)
        for (int u = x0; u < x0 + side; ++u) img.at(u, v) = fg;
    return img;
}

GrayImage rotate90(const GrayImage& img) {
    GrayImage out = make_gray(img.height, img.width);
    for (int v = 0; v < img.height; ++v)
        for (int u = 0; u < img.width; ++u) out.at(img.height - 1 - v, u) = img.at(u, v);
    return out;
}

}  // namespace

TEST_CASE("constant images contain no corners") {
    const GrayImage img = make_gray(32, 32, 128);
    CHECK(harris_detect(img).empty());
    CHECK(susan_detect(img).empty());
    CHECK(fast_detect(img).empty());
}

TEST_CASE("harris finds exactly the four vertices of a bright square") {
    const GrayImage img = bright_square(64, 20, 20, 11);
    const auto corners = harris_detect(img);
    REQUIRE(corners.size() == 4);
    const std::array<std::pair<int, int>, 4> vertices = {{{20, 20}, {30, 20}, {20, 30}, {30, 30}}};
    for (const auto& [vu, vv] : vertices) {
        bool hit = false;
        for (const Corner& c : corners) {
            if (std::abs(c.u - vu) <= 2 && std::abs(c.v - vv) <= 2) hit = true;
        }
        CHECK(hit);
    }
    for (const Corner& c : corners) {
        CHECK(c.score > 0.0);
        CHECK(c.detector == DetectorKind::Harris);
        // Scores agree with the independent response evaluation.
        CHECK(c.score == Catch::Approx(harris_response_oracle(img, c.u, c.v, {})).epsilon(1e-9));
    }
}

TEST_CASE("harris emits nothing along a step edge interior") {
    GrayImage img = make_gray(48, 48, 0);
    for (int v = 0; v < 48; ++v)
        for (int u = 24; u < 48; ++u) img.at(u, v) = 255;
    for (const Corner& c : harris_detect(img)) {
        // Any response must hug the image border effects, never the edge line.
        CHECK(std::abs(c.u - 24) > 2);
    }
    // The edge away from the corners of the image has rank-1 structure, so
    // the interior row responses are non-positive.
    CHECK(harris_response_oracle(img, 24, 24, {}) <= 0.0);
    CHECK(harris_response_oracle(img, 23, 24, {}) <= 0.0);
}

TEST_CASE("harris corner count is invariant under image rotation") {
    const GrayImage img = bright_square(48, 13, 17, 9);
    const auto a = harris_detect(img);
    const auto b = harris_detect(rotate90(img));
    CHECK(a.size() == b.size());
}

TEST_CASE("susan responds to an isolated bright pixel with an empty USAN") {
    GrayImage img = make_gray(21, 21, 0);
    img.at(10, 10) = 255;
    const auto corners = susan_detect(img);
    REQUIRE(corners.size() == 1);
    CHECK(corners[0].u == 10);
    CHECK(corners[0].v == 10);
    CHECK(corners[0].score == Catch::Approx(18.5).margin(1e-6));  // n is almost exactly 0
    CHECK(corners[0].detector == DetectorKind::Susan);
}

TEST_CASE("susan square vertex response matches the scalar oracle") {
    const GrayImage img = bright_square(48, 16, 16, 12, 30, 255);
    const auto corners = susan_detect(img);
    REQUIRE_FALSE(corners.empty());
    bool near_vertex = false;
    for (const Corner& c : corners) {
        CHECK(c.score == Catch::Approx(susan_response_oracle(img, c.u, c.v, {})).epsilon(1e-9));
        if (std::abs(c.u - 16) <= 1 && std::abs(c.v - 16) <= 1) near_vertex = true;
    }
    CHECK(near_vertex);
}

TEST_CASE("susan mask sizes and defaults") {
    CHECK(SusanConfig{}.effective_g() == 18.5);
    CHECK(SusanConfig{SusanMask::Mask25}.effective_g() == 12.5);
    CHECK(SusanConfig{SusanMask::Mask37, 27.0, 10.0}.effective_g() == 10.0);

    // Response is evaluated over 36 non-nucleus pixels: a constant image has
    // n = 36 >= g everywhere, giving zero response.
    const GrayImage flat = make_gray(16, 16, 77);
    CHECK(susan_response_oracle(flat, 8, 8, {}) == 0.0);
}

TEST_CASE("fast detects an isolated bright pixel via the dark ring") {
    GrayImage img = make_gray(15, 15, 0);
    img.at(7, 7) = 255;
    const auto corners = fast_detect(img);
    REQUIRE(corners.size() == 1);
    CHECK(corners[0].u == 7);
    CHECK(corners[0].v == 7);
    CHECK(corners[0].score == Catch::Approx(16.0 * 255.0));
    CHECK(corners[0].detector == DetectorKind::Fast);
}

TEST_CASE("fast segment test equals the rotation-scan oracle on sampled masks") {
    SplitMix64 rng(321);
    for (int i = 0; i < 5000; ++i) {
        const auto bits = static_cast<std::uint16_t>(rng.next() & 0xFFFF);
        for (int t_f = 9; t_f <= 16; ++t_f) {
            CAPTURE(bits, t_f);
            REQUIRE(has_circular_run(bits, t_f) == fast_run_oracle(bits, t_f));
        }
    }
    // wrap-around runs
    CHECK(has_circular_run(0xF00F, 8));
    CHECK_FALSE(has_circular_run(0xF00F, 9));
    CHECK(has_circular_run(0xFFFF, 16));
    CHECK_FALSE(has_circular_run(0x0000, 1));
}

TEST_CASE("non_max_suppress") {
    auto mk = [](int u, int v, double s) { return Corner{u, v, s, DetectorKind::Fast}; };

    SECTION("far apart points both survive") {
        const auto kept = non_max_suppress({mk(10, 10, 5.0), mk(15, 10, 4.0)}, 1);
        CHECK(kept.size() == 2);
    }

    SECTION("the higher score wins inside the radius") {
        const auto kept = non_max_suppress({mk(10, 10, 10.0), mk(11, 10, 9.0)}, 1);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].u == 10);
        CHECK(kept[0].score == 10.0);
    }

    SECTION("equal scores keep exactly the raster-earlier point") {
        const auto kept = non_max_suppress({mk(11, 10, 7.0), mk(10, 10, 7.0)}, 1);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].u == 10);
        CHECK(kept[0].v == 10);

        const auto vertical = non_max_suppress({mk(10, 11, 7.0), mk(10, 10, 7.0)}, 1);
        REQUIRE(vertical.size() == 1);
        CHECK(vertical[0].v == 10);
    }

    SECTION("radius is a Chebyshev distance") {
        const auto kept = non_max_suppress({mk(10, 10, 5.0), mk(12, 12, 4.0)}, 2);
        REQUIRE(kept.size() == 1);
        const auto kept3 = non_max_suppress({mk(10, 10, 5.0), mk(13, 12, 4.0)}, 2);
        CHECK(kept3.size() == 2);
    }
}

TEST_CASE("fast and susan positions are invariant to a uniform intensity shift") {
    // Beacon-like blobs at 180 over 30, shifted by +40 (no saturation).
    GrayImage img = make_gray(64, 64, 30);
    for (const auto& [cx, cy] : {std::pair{20, 20}, {44, 25}, {30, 47}}) {
        for (int dv = -2; dv <= 2; ++dv)
            for (int du = -2; du <= 2; ++du)
                if (du * du + dv * dv <= 4) img.at(cx + du, cy + dv) = 180;
    }
    GrayImage shifted = img;
    for (auto& p : shifted.pixels) p = static_cast<std::uint8_t>(p + 40);

    auto positions = [](const std::vector<Corner>& cs) {
        std::set<std::pair<int, int>> s;
        for (const Corner& c : cs) s.insert({c.u, c.v});
        return s;
    };
    CHECK(positions(fast_detect(img)) == positions(fast_detect(shifted)));
    CHECK(positions(susan_detect(img)) == positions(susan_detect(shifted)));
}

TEST_CASE("detection is deterministic") {
    SplitMix64 rng(555);
    GrayImage img = make_gray(96, 96, 20);
    for (int i = 0; i < 30; ++i) {
        const int cx = 5 + rng.uniform_int(86);
        const int cy = 5 + rng.uniform_int(86);
        for (int dv = -2; dv <= 2; ++dv)
            for (int du = -2; du <= 2; ++du)
                if (du * du + dv * dv <= 4 && cx + du < 96 && cy + dv < 96)
                    img.at(cx + du, cy + dv) = 250;
    }
    auto same = [](const std::vector<Corner>& a, const std::vector<Corner>& b) {
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i].u != b[i].u || a[i].v != b[i].v || a[i].score != b[i].score) return false;
        }
        return true;
    };
    CHECK(same(harris_detect(img), harris_detect(img)));
    CHECK(same(susan_detect(img), susan_detect(img)));
    CHECK(same(fast_detect(img), fast_detect(img)));
}

TEST_CASE("every detector recalls every beacon on a clean rendered frame") {
    const auto intr = intrinsics_from_fov(60.0, 512, 384, 38.0);
    const std::vector<FeaturePoint3D> pfps = {
        {1, 0.0, 15.79, -1.83},   {2, 2.69, 6.75, 0.11},   {3, -2.69, 6.75, 0.11},
        {4, 16.12, -6.98, -0.94}, {5, 6.2, -4.33, -2.48},  {6, -6.2, -4.33, -2.48},
        {7, -16.12, -6.98, -0.94}};
    SceneConfig scene;
    scene.noise_sigma = 0.0;
    scene.rng_seed = 9;
    const PoseVector pose{0, 62.5, 42.5, 0, 0, 0};
    const GrayImage gray = v_channel(render_frame(pose, scene, intr, pfps));

    const auto projections = project_visible_set(intr, pose, pfps);
    for (const auto& corners : {harris_detect(gray), susan_detect(gray), fast_detect(gray)}) {
        for (const PixelPoint& p : projections) {
            REQUIRE(p.visible);
            const double cu = std::lround(p.u);
            const double cv = std::lround(p.v);
            double best = 1e9;
            for (const Corner& c : corners) best = std::min(best, std::hypot(c.u - cu, c.v - cv));
            CHECK(best <= 2.0 + 1e-9);
        }
    }
}

TEST_CASE("corners respect the detector border margin") {
    GrayImage img = make_gray(32, 32, 0);
    // bright pixels hugging the border and one interior
    img.at(0, 0) = 255;
    img.at(31, 5) = 255;
    img.at(2, 30) = 255;
    img.at(16, 16) = 255;
    for (const Corner& c : harris_detect(img)) {
        CHECK(c.u >= 3);
        CHECK(c.v >= 3);
        CHECK(c.u < 29);
        CHECK(c.v < 29);
    }
    for (const Corner& c : susan_detect(img)) {
        CHECK(c.u >= 3);
        CHECK(c.v >= 3);
        CHECK(c.u < 29);
        CHECK(c.v < 29);
    }
    for (const Corner& c : fast_detect(img)) {
        CHECK(c.u >= 3);
        CHECK(c.v >= 3);
        CHECK(c.u < 29);
        CHECK(c.v < 29);
    }
}

TEST_CASE("images below the footprint are rejected") {
    const GrayImage tiny = make_gray(6, 6, 0);
    CHECK_THROWS_AS(harris_detect(tiny), ImageTooSmall);
    CHECK_THROWS_AS(susan_detect(tiny), ImageTooSmall);
    CHECK_THROWS_AS(fast_detect(tiny), ImageTooSmall);
    // the 25-pixel mask has a smaller footprint
    CHECK_NOTHROW(susan_detect(make_gray(6, 6, 0), {SusanMask::Mask25}));
}

TEST_CASE("harris response oracle agrees across a textured image") {
    SplitMix64 rng(9001);
    GrayImage img = make_gray(40, 40, 0);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(256));
    HarrisConfig cfg;
    cfg.response_threshold = 1e4;  // let plenty of texture through
    for (const Corner& c : harris_detect(img, cfg)) {
        CHECK(c.score == Catch::Approx(harris_response_oracle(img, c.u, c.v, cfg)).epsilon(1e-9));
    }
    SusanConfig scfg;
    for (const Corner& c : susan_detect(img, scfg)) {
        CHECK(c.score == Catch::Approx(susan_response_oracle(img, c.u, c.v, scfg)).epsilon(1e-9));
    }
}
