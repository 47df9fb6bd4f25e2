#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mvrp/correspondence.hpp"
#include "mvrp/detectors.hpp"
#include "mvrp/errors.hpp"
#include "mvrp/geometry.hpp"
#include "mvrp/image.hpp"
#include "mvrp/rng.hpp"
#include "mvrp/scenegen.hpp"
#include "mvrp/solver.hpp"

namespace mvrp {

enum class FrameStatus { Ok, InsufficientPoints, NotConverged };

inline const char* frame_status_name(FrameStatus s) {
    switch (s) {
        case FrameStatus::Ok: return "Ok";
        case FrameStatus::InsufficientPoints: return "InsufficientPoints";
        case FrameStatus::NotConverged: return "NotConverged";
    }
    return "?";
}

/// Everything one benchmark run needs. Loadable from a keyed text file
/// whose keys mirror the field names (see load_run_config).
struct RunConfig {
    DetectorKind detector = DetectorKind::Fast;
    HarrisConfig harris;
    SusanConfig susan;
    FastConfig fast;
    SolverConfig solver;
    SceneConfig scene;
    TrajectoryConfig trajectory;

    // intrinsics parameterization
    double fov_y = 60.0;   // degrees, vertical
    int width = 512;
    int height = 384;
    double alpha = 38.0;   // degrees, camera pitch on the UAV

    double t1 = 5.0;       // pixels, absolute gross-error threshold
    double t2 = 50.0;      // percent, relative gross-error threshold
    double miss_radius = 3.0;      // pixels, truth-anchored miss counting
    double init_noise_pos = 0.5;   // meters, simulated GPS/INS prior noise
    double init_noise_ang = 1.0;   // degrees
    int outer_passes_max = 3;      // project/match/solve refinement passes

    std::string out_dir = "out";
    std::string pfp_file = "data/kc10_pfps.txt";
    std::uint64_t seed = 1;
    bool deterministic_timing = false;  // record t_fe as 0 for reproducible files

    CameraIntrinsics intrinsics() const {
        return intrinsics_from_fov(fov_y, width, height, alpha);
    }
};

/// Per-frame outcome: estimate, signed errors against truth, detection
/// time, and the bookkeeping counts.
struct FrameResult {
    int k = 0;
    PoseEstimate estimate;
    PoseVector truth;
    double e_x = 0, e_y = 0, e_z = 0;           // meters, estimate - truth
    double e_psi = 0, e_theta = 0, e_phi = 0;   // degrees
    double t_fe = 0.0;                          // seconds, detection only
    int n_extracted = 0;
    int n_visible = 0;
    int n_miss = 0;
    int n_m = 0;
    FrameStatus status = FrameStatus::Ok;
    MatchSet matches;  // final matched set fed to the solver
};

inline std::vector<Corner> detect_corners(const GrayImage& gray, const RunConfig& cfg) {
    switch (cfg.detector) {
        case DetectorKind::Harris: return harris_detect(gray, cfg.harris);
        case DetectorKind::Susan: return susan_detect(gray, cfg.susan);
        case DetectorKind::Fast: return fast_detect(gray, cfg.fast);
    }
    return {};
}

/// One pass of the per-frame loop: V channel, detection (timed), then up to
/// outer_passes_max rounds of project -> match -> gross-error elimination
/// -> pose solve, re-projecting at each refined estimate. The loop exits
/// early once the matched pair set stops changing. Failures are encoded in
/// status; on InsufficientPoints the initial value is passed through.
inline FrameResult run_frame(const RgbImage& image, int k, const PoseVector& init,
                             const RunConfig& cfg, const PoseVector& truth,
                             const std::vector<FeaturePoint3D>& pfps) {
    const CameraIntrinsics intr = cfg.intrinsics();
    const GrayImage gray = v_channel(image);

    const auto start = std::chrono::steady_clock::now();
    const std::vector<Corner> corners = detect_corners(gray, cfg);
    const auto stop = std::chrono::steady_clock::now();

    FrameResult fr;
    fr.k = k;
    fr.truth = truth;
    fr.t_fe = cfg.deterministic_timing
                  ? 0.0
                  : std::chrono::duration<double>(stop - start).count();
    fr.n_extracted = static_cast<int>(corners.size());

    // Miss counting is anchored to the truth projection.
    for (const PixelPoint& p : project_visible_set(intr, truth, pfps)) {
        if (!p.visible) continue;
        ++fr.n_visible;
        double best = std::numeric_limits<double>::infinity();
        for (const Corner& c : corners) {
            best = std::min(best, std::hypot(c.u - p.u, c.v - p.v));
        }
        if (best > cfg.miss_radius) ++fr.n_miss;
    }

    std::vector<PixelPoint> extracted;
    extracted.reserve(corners.size());
    for (const Corner& c : corners) {
        PixelPoint p;
        p.u = c.u;
        p.v = c.v;
        p.visible = true;
        extracted.push_back(p);
    }

    PoseVector pose = init;
    PoseEstimate est;
    est.pose = init;
    fr.status = FrameStatus::Ok;
    std::vector<std::tuple<int, double, double>> prev_keys;
    for (int pass = 0; pass < cfg.outer_passes_max; ++pass) {
        std::vector<PixelPoint> visible;
        for (const PixelPoint& p : project_visible_set(intr, pose, pfps)) {
            if (p.visible) visible.push_back(p);
        }
        const MatchSet ms =
            eliminate_gross_errors(mutual_nearest_match(visible, extracted), cfg.t1, cfg.t2);
        fr.matches = ms;
        if (ms.size() < 3) {
            fr.status = FrameStatus::InsufficientPoints;
            est = PoseEstimate{};
            est.pose = init;
            est.n_m = ms.size();
            break;
        }
        try {
            est = lm_solve(pose, ms, intr, pfps, cfg.solver);
        } catch (const BehindCamera&) {
            fr.status = FrameStatus::NotConverged;
            est = PoseEstimate{};
            est.pose = init;
            est.n_m = ms.size();
            break;
        }
        pose = est.pose;
        std::vector<std::tuple<int, double, double>> keys;
        keys.reserve(ms.pairs.size());
        for (const MatchedPair& p : ms.pairs) {
            keys.emplace_back(p.pfp_id, p.extracted.u, p.extracted.v);
        }
        if (keys == prev_keys) break;
        prev_keys = std::move(keys);
    }
    if (fr.status == FrameStatus::Ok && !est.converged) {
        fr.status = FrameStatus::NotConverged;
    }
    fr.estimate = est;
    fr.n_m = est.n_m;
    fr.e_x = est.pose.x - truth.x;
    fr.e_y = est.pose.y - truth.y;
    fr.e_z = est.pose.z - truth.z;
    fr.e_psi = est.pose.psi - truth.psi;
    fr.e_theta = est.pose.theta - truth.theta;
    fr.e_phi = est.pose.phi - truth.phi;
    return fr;
}

/// Rendered sequence shared by all detector runs of one benchmark.
struct TrajectoryRun {
    std::vector<PoseVector> truth;
    std::vector<RgbImage> frames;
    PoseVector prior;  // simulated GPS/INS pose for the first frame
};

inline TrajectoryRun render_trajectory(const RunConfig& cfg,
                                       const std::vector<FeaturePoint3D>& pfps) {
    TrajectoryRun run;
    TrajectoryConfig tc = cfg.trajectory;
    tc.jitter_seed = cfg.seed ^ 0x6A69747465724AULL;
    run.truth = gen_trajectory(tc);
    const CameraIntrinsics intr = cfg.intrinsics();
    run.frames.reserve(run.truth.size());
    for (size_t k = 0; k < run.truth.size(); ++k) {
        SceneConfig sc = cfg.scene;
        sc.rng_seed = cfg.seed ^ static_cast<std::uint64_t>(k);  // per-frame stream
        run.frames.push_back(render_frame(run.truth[k], sc, intr, pfps));
    }
    SplitMix64 prior_rng(cfg.seed ^ 0x70726A6F72ULL);
    run.prior = run.truth[0];
    run.prior.x += prior_rng.uniform(-cfg.init_noise_pos, cfg.init_noise_pos);
    run.prior.y += prior_rng.uniform(-cfg.init_noise_pos, cfg.init_noise_pos);
    run.prior.z += prior_rng.uniform(-cfg.init_noise_pos, cfg.init_noise_pos);
    run.prior.psi += prior_rng.uniform(-cfg.init_noise_ang, cfg.init_noise_ang);
    run.prior.theta += prior_rng.uniform(-cfg.init_noise_ang, cfg.init_noise_ang);
    run.prior.phi += prior_rng.uniform(-cfg.init_noise_ang, cfg.init_noise_ang);
    return run;
}

/// Runs the configured detector over an already rendered sequence. Frame 1
/// starts from the noisy prior; later frames start from the previous
/// estimate, or from the previous frame's initial value when that frame
/// failed.
inline std::vector<FrameResult> run_trajectory_on(const TrajectoryRun& data,
                                                  const RunConfig& cfg,
                                                  const std::vector<FeaturePoint3D>& pfps) {
    std::vector<FrameResult> results;
    results.reserve(data.frames.size());
    std::optional<PoseEstimate> previous;
    PoseVector last_init = data.prior;
    for (size_t k = 0; k < data.frames.size(); ++k) {
        PoseVector init;
        if (k == 0) {
            init = initial_pose(1, std::nullopt, data.prior);
        } else if (previous) {
            init = initial_pose(static_cast<int>(k) + 1, previous, data.prior);
        } else {
            init = last_init;
        }
        FrameResult fr =
            run_frame(data.frames[k], static_cast<int>(k), init, cfg, data.truth[k], pfps);
        last_init = init;
        previous = fr.status == FrameStatus::Ok ? std::optional<PoseEstimate>(fr.estimate)
                                                : std::nullopt;
        results.push_back(std::move(fr));
    }
    return results;
}

inline std::vector<FrameResult> run_trajectory(const RunConfig& cfg) {
    const std::vector<FeaturePoint3D> pfps = load_pfps(cfg.pfp_file);
    return run_trajectory_on(render_trajectory(cfg, pfps), cfg, pfps);
}

/// Per-detector aggregate: detection time and miss counts over all frames,
/// absolute pose errors over Ok frames only (absent when no frame is Ok).
struct DetectorSummary {
    std::string detector;
    int frames = 0;
    int ok = 0;
    int failed = 0;
    double mean_t_fe = 0.0;
    double mean_n_miss = 0.0;
    std::optional<std::array<double, 6>> mean_abs_err;  // x,y,z,psi,theta,phi
};

inline DetectorSummary summarize(const std::string& name,
                                 const std::vector<FrameResult>& results) {
    if (results.empty()) {
        throw EmptyInput("summarize: no frame results");
    }
    DetectorSummary s;
    s.detector = name;
    s.frames = static_cast<int>(results.size());
    std::array<double, 6> acc{};
    for (const FrameResult& fr : results) {
        s.mean_t_fe += fr.t_fe;
        s.mean_n_miss += fr.n_miss;
        if (fr.status == FrameStatus::Ok) {
            ++s.ok;
            acc[0] += std::abs(fr.e_x);
            acc[1] += std::abs(fr.e_y);
            acc[2] += std::abs(fr.e_z);
            acc[3] += std::abs(fr.e_psi);
            acc[4] += std::abs(fr.e_theta);
            acc[5] += std::abs(fr.e_phi);
        }
    }
    s.failed = s.frames - s.ok;
    s.mean_t_fe /= s.frames;
    s.mean_n_miss /= s.frames;
    if (s.ok > 0) {
        for (double& a : acc) a /= s.ok;
        s.mean_abs_err = acc;
    }
    return s;
}

namespace detail {

inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string fmt_g4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline const char* series_color(const std::string& name, size_t index) {
    if (name == "harris") return "#1f77b4";
    if (name == "susan") return "#2ca02c";
    if (name == "fast") return "#d62728";
    static const char* fallback[] = {"#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    return fallback[index % 4];
}

/// Hand-emitted line chart: one polyline per series, frame index on the
/// abscissa.
inline void write_error_chart(
    const std::string& path, const std::string& title, const std::string& unit,
    const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    const double left = 60, right = 700, top = 36, bottom = 384;
    size_t n = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [name, vals] : series) {
        n = std::max(n, vals.size());
        for (double v : vals) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(lo <= hi)) {
        lo = -1.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const auto xmap = [&](size_t k) {
        return n > 1 ? left + (right - left) * static_cast<double>(k) /
                                  static_cast<double>(n - 1)
                     : (left + right) / 2.0;
    };
    const auto ymap = [&](double v) { return bottom - (bottom - top) * (v - lo) / (hi - lo); };

    std::ofstream out(path);
    if (!out) throw IoError("cannot write chart: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"420\" "
           "viewBox=\"0 0 860 420\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"860\" height=\"420\" fill=\"white\"/>\n";
    out << "<text x=\"60\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\">" << title
        << " (" << unit << ")</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    if (lo < 0.0 && hi > 0.0) {
        out << "<line x1=\"" << left << "\" y1=\"" << fmt_fixed2(ymap(0.0)) << "\" x2=\""
            << right << "\" y2=\"" << fmt_fixed2(ymap(0.0))
            << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
    }
    out << "<text x=\"8\" y=\"" << fmt_fixed2(top + 5)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_g4(hi) << "</text>\n";
    out << "<text x=\"8\" y=\"" << fmt_fixed2(bottom)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_g4(lo) << "</text>\n";
    out << "<text x=\"" << left << "\" y=\"404\" font-family=\"sans-serif\" "
           "font-size=\"11\">frame 0</text>\n";
    out << "<text x=\"" << right - 40 << "\" y=\"404\" font-family=\"sans-serif\" "
           "font-size=\"11\">frame " << (n > 0 ? n - 1 : 0) << "</text>\n";
    size_t idx = 0;
    for (const auto& [name, vals] : series) {
        const char* color = series_color(name, idx);
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t k = 0; k < vals.size(); ++k) {
            if (k) out << ' ';
            out << fmt_fixed2(xmap(k)) << ',' << fmt_fixed2(ymap(vals[k]));
        }
        out << "\"/>\n";
        out << "<rect x=\"712\" y=\"" << fmt_fixed2(top + 14.0 * idx) << "\" width=\"10\" "
            << "height=\"10\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"727\" y=\"" << fmt_fixed2(top + 14.0 * idx + 9)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << name << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace detail

/// Writes frames_<detector>.csv per run, summary.csv and the six pose
/// component error charts into out_dir.
inline void emit_reports(
    const std::vector<std::pair<std::string, std::vector<FrameResult>>>& runs,
    const std::vector<DetectorSummary>& summaries, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    for (const auto& [name, results] : runs) {
        const std::string path = out_dir + "/frames_" + name + ".csv";
        std::ofstream csv(path);
        if (!csv) throw IoError("cannot write " + path);
        csv << "k,x_err,y_err,z_err,psi_err,theta_err,phi_err,t_fe,n_miss,n_m,status\n";
        for (const FrameResult& fr : results) {
            csv << fr.k << ',' << detail::fmt_g17(fr.e_x) << ',' << detail::fmt_g17(fr.e_y)
                << ',' << detail::fmt_g17(fr.e_z) << ',' << detail::fmt_g17(fr.e_psi) << ','
                << detail::fmt_g17(fr.e_theta) << ',' << detail::fmt_g17(fr.e_phi) << ','
                << detail::fmt_g17(fr.t_fe) << ',' << fr.n_miss << ',' << fr.n_m << ','
                << frame_status_name(fr.status) << '\n';
        }
        if (!csv) throw IoError("write failed: " + path);
    }

    {
        const std::string path = out_dir + "/summary.csv";
        std::ofstream csv(path);
        if (!csv) throw IoError("cannot write " + path);
        csv << "detector,frames,ok,failed,mean_t_fe,mean_n_miss,"
               "mean_abs_x,mean_abs_y,mean_abs_z,mean_abs_psi,mean_abs_theta,mean_abs_phi\n";
        for (const DetectorSummary& s : summaries) {
            csv << s.detector << ',' << s.frames << ',' << s.ok << ',' << s.failed << ','
                << detail::fmt_g17(s.mean_t_fe) << ',' << detail::fmt_g17(s.mean_n_miss);
            for (int i = 0; i < 6; ++i) {
                csv << ',';
                if (s.mean_abs_err) csv << detail::fmt_g17((*s.mean_abs_err)[i]);
            }
            csv << '\n';
        }
        if (!csv) throw IoError("write failed: " + path);
    }

    const std::array<std::pair<const char*, const char*>, 6> components = {{
        {"x", "m"}, {"y", "m"}, {"z", "m"}, {"psi", "deg"}, {"theta", "deg"}, {"phi", "deg"},
    }};
    for (size_t c = 0; c < components.size(); ++c) {
        std::vector<std::pair<std::string, std::vector<double>>> series;
        for (const auto& [name, results] : runs) {
            std::vector<double> vals;
            vals.reserve(results.size());
            for (const FrameResult& fr : results) {
                const double e[6] = {fr.e_x, fr.e_y, fr.e_z, fr.e_psi, fr.e_theta, fr.e_phi};
                vals.push_back(e[c]);
            }
            series.emplace_back(name, std::move(vals));
        }
        detail::write_error_chart(
            out_dir + "/err_" + components[c].first + ".svg",
            std::string(components[c].first) + " estimation error", components[c].second,
            series);
    }
}

/// Runs one detector (cfg.detector) and writes its reports.
inline std::vector<FrameResult> single_run(const RunConfig& cfg) {
    const std::vector<FeaturePoint3D> pfps = load_pfps(cfg.pfp_file);
    const TrajectoryRun data = render_trajectory(cfg, pfps);
    std::vector<FrameResult> results = run_trajectory_on(data, cfg, pfps);
    const std::string name = detector_name(cfg.detector);
    emit_reports({{name, results}}, {summarize(name, results)}, cfg.out_dir);
    return results;
}

/// Runs all three detectors over one rendered sequence and writes the
/// comparison reports.
inline std::vector<std::pair<std::string, std::vector<FrameResult>>> bench_run(
    const RunConfig& cfg) {
    const std::vector<FeaturePoint3D> pfps = load_pfps(cfg.pfp_file);
    const TrajectoryRun data = render_trajectory(cfg, pfps);
    std::vector<std::pair<std::string, std::vector<FrameResult>>> runs;
    std::vector<DetectorSummary> summaries;
    for (DetectorKind d : {DetectorKind::Harris, DetectorKind::Susan, DetectorKind::Fast}) {
        RunConfig rc = cfg;
        rc.detector = d;
        std::vector<FrameResult> results = run_trajectory_on(data, rc, pfps);
        summaries.push_back(summarize(detector_name(d), results));
        runs.emplace_back(detector_name(d), std::move(results));
    }
    emit_reports(runs, summaries, cfg.out_dir);
    return runs;
}

// ---------------------------------------------------------------------------
// Config file: `key = value` lines, `#` comments, optional [section] headers
// or dotted keys. Keys mirror the RunConfig field names.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double cfg_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw FormatError("config key " + key + ": bad number `" + value + "`");
    }
}

inline int cfg_int(const std::string& key, const std::string& value) {
    const double v = cfg_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw FormatError("config key " + key + ": expected an integer, got `" + value + "`");
    }
    return i;
}

inline std::uint64_t cfg_u64(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw FormatError("config key " + key + ": bad unsigned integer `" + value + "`");
    }
}

inline DetectorKind cfg_detector(const std::string& value) {
    if (value == "harris") return DetectorKind::Harris;
    if (value == "susan") return DetectorKind::Susan;
    if (value == "fast") return DetectorKind::Fast;
    throw FormatError("unknown detector `" + value + "` (harris, susan or fast)");
}

inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
    // clang-format off
    if      (key == "detector")              cfg.detector = cfg_detector(value);
    else if (key == "seed")                  cfg.seed = cfg_u64(key, value);
    else if (key == "out_dir")               cfg.out_dir = value;
    else if (key == "pfp_file")              cfg.pfp_file = value;
    else if (key == "t1")                    cfg.t1 = cfg_double(key, value);
    else if (key == "t2")                    cfg.t2 = cfg_double(key, value);
    else if (key == "miss_radius")           cfg.miss_radius = cfg_double(key, value);
    else if (key == "init_noise_pos")        cfg.init_noise_pos = cfg_double(key, value);
    else if (key == "init_noise_ang")        cfg.init_noise_ang = cfg_double(key, value);
    else if (key == "outer_passes_max")      cfg.outer_passes_max = cfg_int(key, value);
    else if (key == "intrinsics.fov_y")      cfg.fov_y = cfg_double(key, value);
    else if (key == "intrinsics.width")      cfg.width = cfg_int(key, value);
    else if (key == "intrinsics.height")     cfg.height = cfg_int(key, value);
    else if (key == "intrinsics.alpha")      cfg.alpha = cfg_double(key, value);
    else if (key == "scene.beacon_radius")        cfg.scene.beacon_radius = cfg_int(key, value);
    else if (key == "scene.beacon_intensity")     cfg.scene.beacon_intensity = cfg_int(key, value);
    else if (key == "scene.background_intensity") cfg.scene.background_intensity = cfg_int(key, value);
    else if (key == "scene.noise_sigma")          cfg.scene.noise_sigma = cfg_double(key, value);
    else if (key == "scene.distractor_count")     cfg.scene.distractor_count = cfg_int(key, value);
    else if (key == "trajectory.start_x")     cfg.trajectory.start.x = cfg_double(key, value);
    else if (key == "trajectory.start_y")     cfg.trajectory.start.y = cfg_double(key, value);
    else if (key == "trajectory.start_z")     cfg.trajectory.start.z = cfg_double(key, value);
    else if (key == "trajectory.start_psi")   cfg.trajectory.start.psi = cfg_double(key, value);
    else if (key == "trajectory.start_theta") cfg.trajectory.start.theta = cfg_double(key, value);
    else if (key == "trajectory.start_phi")   cfg.trajectory.start.phi = cfg_double(key, value);
    else if (key == "trajectory.step_y")      cfg.trajectory.step_y = cfg_double(key, value);
    else if (key == "trajectory.step_z")      cfg.trajectory.step_z = cfg_double(key, value);
    else if (key == "trajectory.frame_count") cfg.trajectory.frame_count = cfg_int(key, value);
    else if (key == "trajectory.attitude_jitter") cfg.trajectory.attitude_jitter = cfg_double(key, value);
    else if (key == "harris.k_h")                cfg.harris.k_h = cfg_double(key, value);
    else if (key == "harris.window_radius")      cfg.harris.window_radius = cfg_int(key, value);
    else if (key == "harris.gaussian_sigma")     cfg.harris.gaussian_sigma = cfg_double(key, value);
    else if (key == "harris.response_threshold") cfg.harris.response_threshold = cfg_double(key, value);
    else if (key == "harris.nms_radius")         cfg.harris.nms_radius = cfg_int(key, value);
    else if (key == "susan.mask") {
        if (value == "37" || value == "mask37") cfg.susan.mask = SusanMask::Mask37;
        else if (value == "25" || value == "mask25") cfg.susan.mask = SusanMask::Mask25;
        else throw FormatError("config key susan.mask: expected 37 or 25, got `" + value + "`");
    }
    else if (key == "susan.t")        cfg.susan.t = cfg_double(key, value);
    else if (key == "susan.g")        cfg.susan.g = cfg_double(key, value);
    else if (key == "fast.epsilon")   cfg.fast.epsilon = cfg_double(key, value);
    else if (key == "fast.t_f")       cfg.fast.t_f = cfg_int(key, value);
    else if (key == "fast.nms_radius") cfg.fast.nms_radius = cfg_int(key, value);
    else if (key == "solver.max_iterations") cfg.solver.max_iterations = cfg_int(key, value);
    else if (key == "solver.lambda0")        cfg.solver.lambda0 = cfg_double(key, value);
    else if (key == "solver.lambda_up")      cfg.solver.lambda_up = cfg_double(key, value);
    else if (key == "solver.lambda_down")    cfg.solver.lambda_down = cfg_double(key, value);
    else if (key == "solver.step_tol")       cfg.solver.step_tol = cfg_double(key, value);
    else if (key == "solver.residual_tol")   cfg.solver.residual_tol = cfg_double(key, value);
    else if (key == "solver.fd_step_pos")    cfg.solver.fd_step_pos = cfg_double(key, value);
    else if (key == "solver.fd_step_ang")    cfg.solver.fd_step_ang = cfg_double(key, value);
    else throw FormatError("unknown config key `" + key + "`");
    // clang-format on
}

}  // namespace detail

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected `key = value`");
        }
        std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!section.empty() && key.find('.') == std::string::npos) {
            key = section + "." + key;
        }
        try {
            detail::apply_config_entry(cfg, key, value);
        } catch (const FormatError& e) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

}  // namespace mvrp
