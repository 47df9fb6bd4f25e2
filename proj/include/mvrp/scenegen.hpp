#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mvrp/geometry.hpp"
#include "mvrp/image.hpp"
#include "mvrp/rng.hpp"

namespace mvrp {

/// Synthetic frame parameters. Beacons are rendered as uniform bright disks
/// on a noisy background; optional distractor squares exercise the
/// gross-error elimination.
struct SceneConfig {
    int beacon_radius = 2;          // pixels
    int beacon_intensity = 255;     // 0..255
    int background_intensity = 30;  // 0..255
    double noise_sigma = 2.0;       // intensity units
    int distractor_count = 0;
    std::uint64_t rng_seed = 0;
};

/// Linear approach trajectory in the UAV frame.
struct TrajectoryConfig {
    PoseVector start{0.0, 80.0, 60.0, 0.0, 0.0, 0.0};
    double step_y = -0.5;  // meters per frame
    double step_z = -0.5;  // meters per frame
    int frame_count = 71;
    double attitude_jitter = 0.0;  // degrees, uniform on each attitude angle
    std::uint64_t jitter_seed = 0;
};

/// Ground-truth poses: start + k*(0, step_y, step_z, 0, 0, 0) for
/// k = 0..frame_count-1, with optional seeded attitude jitter.
inline std::vector<PoseVector> gen_trajectory(const TrajectoryConfig& cfg) {
    std::vector<PoseVector> out;
    out.reserve(static_cast<size_t>(cfg.frame_count));
    SplitMix64 rng(cfg.jitter_seed);
    for (int k = 0; k < cfg.frame_count; ++k) {
        PoseVector p = cfg.start;
        p.y += k * cfg.step_y;
        p.z += k * cfg.step_z;
        if (cfg.attitude_jitter > 0.0) {
            p.psi += rng.uniform(-cfg.attitude_jitter, cfg.attitude_jitter);
            p.theta += rng.uniform(-cfg.attitude_jitter, cfg.attitude_jitter);
            p.phi += rng.uniform(-cfg.attitude_jitter, cfg.attitude_jitter);
        }
        out.push_back(p);
    }
    return out;
}

namespace detail {

inline void stamp_disk(GrayImage& img, int cx, int cy, int radius, std::uint8_t value) {
    for (int dv = -radius; dv <= radius; ++dv) {
        for (int du = -radius; du <= radius; ++du) {
            if (du * du + dv * dv > radius * radius) continue;
            const int u = cx + du;
            const int v = cy + dv;
            if (u < 0 || u >= img.width || v < 0 || v >= img.height) continue;
            img.at(u, v) = value;
        }
    }
}

inline void stamp_square(GrayImage& img, int cx, int cy, int half, std::uint8_t value) {
    for (int dv = -half; dv <= half; ++dv) {
        for (int du = -half; du <= half; ++du) {
            const int u = cx + du;
            const int v = cy + dv;
            if (u < 0 || u >= img.width || v < 0 || v >= img.height) continue;
            img.at(u, v) = value;
        }
    }
}

}  // namespace detail

/// Renders one frame: noisy background, one disk per visible feature point
/// at its rounded projection, then distractor squares at least 10 px away
/// from every rendered beacon center. Deterministic for a given seed. The
/// output is RGB with equal channels.
inline RgbImage render_frame(const PoseVector& pose, const SceneConfig& scene,
                             const CameraIntrinsics& intr,
                             const std::vector<FeaturePoint3D>& pfps) {
    if (!(scene.beacon_intensity >
          scene.background_intensity + 3.0 * scene.noise_sigma)) {
        throw std::invalid_argument(
            "beacon intensity must exceed background by more than 3 noise sigmas");
    }
    SplitMix64 rng(scene.rng_seed);

    GrayImage canvas = make_gray(intr.width, intr.height,
                                 static_cast<std::uint8_t>(scene.background_intensity));
    if (scene.noise_sigma > 0.0) {
        for (std::uint8_t& px : canvas.pixels) {
            const double noisy = scene.background_intensity + scene.noise_sigma * rng.normal();
            px = static_cast<std::uint8_t>(std::clamp<long>(std::lround(noisy), 0, 255));
        }
    }

    std::vector<std::pair<int, int>> beacon_centers;
    for (const PixelPoint& p : project_visible_set(intr, pose, pfps)) {
        if (!p.visible) continue;
        const int cu = static_cast<int>(std::lround(p.u));
        const int cv = static_cast<int>(std::lround(p.v));
        detail::stamp_disk(canvas, cu, cv, scene.beacon_radius,
                           static_cast<std::uint8_t>(scene.beacon_intensity));
        beacon_centers.emplace_back(cu, cv);
    }

    const int margin = 3;
    for (int i = 0; i < scene.distractor_count; ++i) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            const int cu = margin + rng.uniform_int(intr.width - 2 * margin);
            const int cv = margin + rng.uniform_int(intr.height - 2 * margin);
            bool clear = true;
            for (const auto& [bu, bv] : beacon_centers) {
                const int du = cu - bu;
                const int dv = cv - bv;
                if (du * du + dv * dv < 100) {  // keep 10 px off every beacon
                    clear = false;
                    break;
                }
            }
            if (clear) {
                detail::stamp_square(canvas, cu, cv, 1,
                                     static_cast<std::uint8_t>(scene.beacon_intensity));
                break;
            }
        }
    }

    RgbImage out;
    out.width = canvas.width;
    out.height = canvas.height;
    out.pixels.resize(canvas.pixels.size() * 3);
    for (size_t i = 0; i < canvas.pixels.size(); ++i) {
        out.pixels[3 * i] = canvas.pixels[i];
        out.pixels[3 * i + 1] = canvas.pixels[i];
        out.pixels[3 * i + 2] = canvas.pixels[i];
    }
    return out;
}

}  // namespace mvrp
