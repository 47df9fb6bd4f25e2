#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mvrp/errors.hpp"
#include "mvrp/image.hpp"

namespace mvrp {

enum class DetectorKind { Harris, Susan, Fast };

inline const char* detector_name(DetectorKind d) {
    switch (d) {
        case DetectorKind::Harris: return "harris";
        case DetectorKind::Susan: return "susan";
        case DetectorKind::Fast: return "fast";
    }
    return "?";
}

/// Detected corner at integer pixel coordinates with a positive response.
struct Corner {
    int u = 0;
    int v = 0;
    double score = 0.0;
    DetectorKind detector = DetectorKind::Fast;
};

struct HarrisConfig {
    double k_h = 0.05;               // trace weight, typically 0.04..0.06
    int window_radius = 2;           // 5x5 accumulation window
    double gaussian_sigma = 1.0;
    double response_threshold = 1e6; // on 0..255 intensities
    int nms_radius = 1;
};

enum class SusanMask { Mask37, Mask25 };

struct SusanConfig {
    SusanMask mask = SusanMask::Mask37;
    double t = 27.0;  // intensity similarity scale
    double g = 0.0;   // geometric threshold; 0 selects the mask default

    double effective_g() const {
        if (g > 0.0) return g;
        return mask == SusanMask::Mask37 ? 18.5 : 12.5;
    }
};

struct FastConfig {
    double epsilon = 25.0;  // intensity difference threshold
    int t_f = 12;           // required contiguous arc length, 1..16
    int nms_radius = 1;
};

/// The 16 ring offsets at radius 3, clockwise from the top pixel.
inline constexpr std::array<std::pair<int, int>, 16> kFastRing = {{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

namespace detail {

struct RingRun {
    int len = 0;
    int start = 0;  // ring index of the first pixel in the run
};

/// Longest circularly contiguous run of set bits in a 16-bit ring mask.
/// Ties resolved by the first maximal run met scanning the doubled mask.
inline RingRun longest_circular_run(std::uint16_t bits) {
    if (bits == 0xFFFF) return {16, 0};
    if (bits == 0) return {0, 0};
    const std::uint32_t doubled = (static_cast<std::uint32_t>(bits) << 16) | bits;
    RingRun best;
    int run = 0;
    for (int i = 0; i < 32; ++i) {
        if (doubled & (1u << i)) {
            ++run;
            if (run > best.len) {
                best.len = run;
                best.start = (i - run + 1) % 16;
            }
        } else {
            run = 0;
        }
    }
    return best;
}

inline bool raster_before(const Corner& a, const Corner& b) {
    return a.v < b.v || (a.v == b.v && a.u < b.u);
}

/// Descending score, ties in raster order.
inline void canonical_sort(std::vector<Corner>& cs) {
    std::sort(cs.begin(), cs.end(), [](const Corner& a, const Corner& b) {
        if (a.score != b.score) return a.score > b.score;
        return raster_before(a, b);
    });
}

}  // namespace detail

/// Segment test on a ring mask: true iff a circularly contiguous run of at
/// least min_len set bits exists.
inline bool has_circular_run(std::uint16_t bits, int min_len) {
    return detail::longest_circular_run(bits).len >= min_len;
}

/// Keeps a point iff no strictly higher-scored point lies within Chebyshev
/// distance radius; equal scores are resolved in favor of the earlier point
/// in raster order.
inline std::vector<Corner> non_max_suppress(const std::vector<Corner>& pts, int radius) {
    assert(radius >= 1);
    std::unordered_map<std::int64_t, std::vector<int>> grid;
    grid.reserve(pts.size() * 2);
    auto cell_key = [radius](int u, int v) {
        return (static_cast<std::int64_t>(v / radius) << 32) |
               static_cast<std::int64_t>(static_cast<std::uint32_t>(u / radius));
    };
    for (size_t i = 0; i < pts.size(); ++i) {
        grid[cell_key(pts[i].u, pts[i].v)].push_back(static_cast<int>(i));
    }
    std::vector<Corner> kept;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Corner& p = pts[i];
        bool suppressed = false;
        for (int dv = -1; dv <= 1 && !suppressed; ++dv) {
            for (int du = -1; du <= 1 && !suppressed; ++du) {
                const auto it = grid.find(cell_key(p.u + du * radius, p.v + dv * radius));
                if (it == grid.end()) continue;
                for (int j : it->second) {
                    if (j == static_cast<int>(i)) continue;
                    const Corner& q = pts[j];
                    if (std::abs(q.u - p.u) > radius || std::abs(q.v - p.v) > radius) continue;
                    if (q.score > p.score ||
                        (q.score == p.score && detail::raster_before(q, p))) {
                        suppressed = true;
                        break;
                    }
                }
            }
        }
        if (!suppressed) kept.push_back(p);
    }
    return kept;
}

/// Harris corner detector: 3x3 Sobel gradients, Gaussian-weighted structure
/// matrix over the window, response det - k*trace^2, threshold and NMS.
inline std::vector<Corner> harris_detect(const GrayImage& img, const HarrisConfig& cfg = {}) {
    assert(cfg.window_radius >= 1);
    const int wr = cfg.window_radius;
    const int margin = wr + 1;  // Sobel needs one more ring
    if (img.width < 2 * margin + 1 || img.height < 2 * margin + 1) {
        throw ImageTooSmall("harris: image smaller than " + std::to_string(2 * margin + 1) +
                            "x" + std::to_string(2 * margin + 1));
    }
    if (cfg.k_h < 0.04 || cfg.k_h > 0.06) {
        std::fprintf(stderr, "harris: k_h=%g outside the usual 0.04..0.06 range\n", cfg.k_h);
    }

    const int w = img.width;
    const int h = img.height;
    std::vector<double> ix(static_cast<size_t>(w) * h, 0.0);
    std::vector<double> iy(static_cast<size_t>(w) * h, 0.0);
    for (int v = 1; v < h - 1; ++v) {
        for (int u = 1; u < w - 1; ++u) {
            const auto p = [&](int du, int dv) {
                return static_cast<double>(img.at(u + du, v + dv));
            };
            ix[static_cast<size_t>(v) * w + u] =
                (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            iy[static_cast<size_t>(v) * w + u] =
                (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
        }
    }

    // Normalized Gaussian window
    const int side = 2 * wr + 1;
    std::vector<double> weight(static_cast<size_t>(side) * side);
    double wsum = 0.0;
    for (int dv = -wr; dv <= wr; ++dv) {
        for (int du = -wr; du <= wr; ++du) {
            const double g = std::exp(-(du * du + dv * dv) /
                                      (2.0 * cfg.gaussian_sigma * cfg.gaussian_sigma));
            weight[static_cast<size_t>(dv + wr) * side + (du + wr)] = g;
            wsum += g;
        }
    }
    for (double& g : weight) g /= wsum;

    std::vector<Corner> candidates;
    for (int v = margin; v < h - margin; ++v) {
        for (int u = margin; u < w - margin; ++u) {
            double a = 0.0, b = 0.0, c = 0.0;
            for (int dv = -wr; dv <= wr; ++dv) {
                for (int du = -wr; du <= wr; ++du) {
                    const double wt = weight[static_cast<size_t>(dv + wr) * side + (du + wr)];
                    const double gx = ix[static_cast<size_t>(v + dv) * w + (u + du)];
                    const double gy = iy[static_cast<size_t>(v + dv) * w + (u + du)];
                    a += wt * gx * gx;
                    b += wt * gy * gy;
                    c += wt * gx * gy;
                }
            }
            const double response = (a * b - c * c) - cfg.k_h * (a + b) * (a + b);
            if (response > cfg.response_threshold && response > 0.0) {
                candidates.push_back({u, v, response, DetectorKind::Harris});
            }
        }
    }
    auto kept = non_max_suppress(candidates, cfg.nms_radius);
    detail::canonical_sort(kept);
    return kept;
}

namespace detail {

inline const std::vector<std::pair<int, int>>& susan_offsets(SusanMask mask) {
    static const std::vector<std::pair<int, int>> mask37 = [] {
        // Circular 37-pixel mask, nucleus excluded; row widths 3,5,7,7,7,5,3.
        std::vector<std::pair<int, int>> offs;
        const int half[7] = {1, 2, 3, 3, 3, 2, 1};
        for (int dv = -3; dv <= 3; ++dv) {
            for (int du = -half[dv + 3]; du <= half[dv + 3]; ++du) {
                if (du != 0 || dv != 0) offs.emplace_back(du, dv);
            }
        }
        return offs;
    }();
    static const std::vector<std::pair<int, int>> mask25 = [] {
        // 5x5 square mask, nucleus excluded.
        std::vector<std::pair<int, int>> offs;
        for (int dv = -2; dv <= 2; ++dv) {
            for (int du = -2; du <= 2; ++du) {
                if (du != 0 || dv != 0) offs.emplace_back(du, dv);
            }
        }
        return offs;
    }();
    return mask == SusanMask::Mask37 ? mask37 : mask25;
}

}  // namespace detail

/// SUSAN corner detector: intensity comparison c = exp(-((dI)/t)^6) summed
/// over the circular mask, response g - n where n < g, 5x5-template NMS.
inline std::vector<Corner> susan_detect(const GrayImage& img, const SusanConfig& cfg = {}) {
    const int margin = cfg.mask == SusanMask::Mask37 ? 3 : 2;
    if (img.width < 2 * margin + 1 || img.height < 2 * margin + 1) {
        throw ImageTooSmall("susan: image smaller than the mask footprint");
    }
    const double g = cfg.effective_g();
    const auto& offsets = detail::susan_offsets(cfg.mask);

    // c depends only on the intensity difference; tabulate it once.
    std::array<double, 511> lut;
    for (int d = -255; d <= 255; ++d) {
        const double r = static_cast<double>(d) / cfg.t;
        const double r2 = r * r;
        lut[static_cast<size_t>(d + 255)] = std::exp(-(r2 * r2 * r2));
    }

    std::vector<Corner> candidates;
    for (int v = margin; v < img.height - margin; ++v) {
        for (int u = margin; u < img.width - margin; ++u) {
            const int nucleus = img.at(u, v);
            double n = 0.0;
            for (const auto& [du, dv] : offsets) {
                n += lut[static_cast<size_t>(img.at(u + du, v + dv) - nucleus + 255)];
            }
            if (n < g) {
                candidates.push_back({u, v, g - n, DetectorKind::Susan});
            }
        }
    }
    auto kept = non_max_suppress(candidates, 2);  // 5x5 template
    detail::canonical_sort(kept);
    return kept;
}

/// FAST segment-test detector on the 16-pixel ring of radius 3: a corner
/// needs a contiguous arc of at least t_f ring pixels all brighter than
/// I(P)+epsilon or all darker than I(P)-epsilon. The score is the summed
/// absolute intensity difference over the longest qualifying arc.
inline std::vector<Corner> fast_detect(const GrayImage& img, const FastConfig& cfg = {}) {
    if (img.width < 7 || img.height < 7) {
        throw ImageTooSmall("fast: image smaller than 7x7");
    }
    assert(cfg.t_f >= 1 && cfg.t_f <= 16);

    // A contiguous arc of length t_f covers at least t_f/4 (rounded down) of
    // the four compass ring pixels, so fewer passing compass pixels rule a
    // candidate out without touching the rest of the ring.
    const int compass_need = std::min(cfg.t_f / 4, 4);
    std::vector<Corner> candidates;
    std::array<int, 16> diff{};
    for (int v = 3; v < img.height - 3; ++v) {
        for (int u = 3; u < img.width - 3; ++u) {
            const int center = img.at(u, v);
            if (compass_need > 0) {
                int nb = 0, nd = 0;
                for (int i = 0; i < 16; i += 4) {
                    const int d =
                        img.at(u + kFastRing[i].first, v + kFastRing[i].second) - center;
                    if (d > cfg.epsilon) ++nb;
                    if (-d > cfg.epsilon) ++nd;
                }
                if (nb < compass_need && nd < compass_need) continue;
            }
            std::uint16_t bright = 0, dark = 0;
            for (int i = 0; i < 16; ++i) {
                const int d = img.at(u + kFastRing[i].first, v + kFastRing[i].second) - center;
                diff[static_cast<size_t>(i)] = d;
                if (d > cfg.epsilon) bright |= static_cast<std::uint16_t>(1u << i);
                if (-d > cfg.epsilon) dark |= static_cast<std::uint16_t>(1u << i);
            }
            double score = 0.0;
            for (const std::uint16_t mask : {bright, dark}) {
                const auto run = detail::longest_circular_run(mask);
                if (run.len < cfg.t_f) continue;
                double s = 0.0;
                for (int i = 0; i < run.len; ++i) {
                    s += std::abs(diff[static_cast<size_t>((run.start + i) % 16)]);
                }
                score = std::max(score, s);
            }
            if (score > 0.0) {
                candidates.push_back({u, v, score, DetectorKind::Fast});
            }
        }
    }
    auto kept = non_max_suppress(candidates, cfg.nms_radius);
    detail::canonical_sort(kept);
    return kept;
}

}  // namespace mvrp
