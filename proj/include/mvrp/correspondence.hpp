#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

#include "mvrp/geometry.hpp"

namespace mvrp {

/// A projected/extracted point pair with its Euclidean pixel distance.
struct MatchedPair {
    int pfp_id = 0;
    PixelPoint projected;
    PixelPoint extracted;
    double distance = 0.0;
};

/// Matched pairs ordered by pfp_id. Each feature id and each extracted
/// point appears at most once.
struct MatchSet {
    std::vector<MatchedPair> pairs;

    int size() const { return static_cast<int>(pairs.size()); }
};

/// Mutual nearest neighbor matching: a pair is kept iff the projected point
/// is the extracted point's nearest projected point and vice versa.
/// Distance ties resolve to the lower list index, so the result is
/// deterministic. Callers pass only visible projected points.
inline MatchSet mutual_nearest_match(const std::vector<PixelPoint>& projected,
                                     const std::vector<PixelPoint>& extracted) {
    MatchSet out;
    if (projected.empty() || extracted.empty()) return out;

    auto dist2 = [](const PixelPoint& a, const PixelPoint& b) {
        const double du = a.u - b.u;
        const double dv = a.v - b.v;
        return du * du + dv * dv;
    };
    auto nearest = [&](const PixelPoint& q, const std::vector<PixelPoint>& among) {
        int best = 0;
        double best_d = dist2(q, among[0]);
        for (size_t i = 1; i < among.size(); ++i) {
            const double d = dist2(q, among[i]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        return best;
    };

    std::vector<int> nearest_extracted(projected.size());
    for (size_t i = 0; i < projected.size(); ++i) {
        nearest_extracted[i] = nearest(projected[i], extracted);
    }
    for (size_t j = 0; j < extracted.size(); ++j) {
        const int i = nearest(extracted[j], projected);
        if (nearest_extracted[static_cast<size_t>(i)] == static_cast<int>(j)) {
            assert(projected[static_cast<size_t>(i)].id.has_value());
            MatchedPair p;
            p.pfp_id = *projected[static_cast<size_t>(i)].id;
            p.projected = projected[static_cast<size_t>(i)];
            p.extracted = extracted[j];
            p.distance = std::sqrt(dist2(p.projected, p.extracted));
            out.pairs.push_back(p);
        }
    }
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const MatchedPair& a, const MatchedPair& b) { return a.pfp_id < b.pfp_id; });
    return out;
}

/// Iterative gross-error elimination. A pair is flagged when its distance
/// exceeds t1 pixels and exceeds the mean distance of the other pairs by
/// more than t2 percent; all flagged pairs are removed and the pass
/// repeats until none is flagged. Sets of two or fewer pairs are returned
/// unchanged (the leave-one-out mean is degenerate there).
inline MatchSet eliminate_gross_errors(const MatchSet& m, double t1, double t2) {
    assert(t1 > 0.0 && t2 > 0.0);
    MatchSet out = m;
    while (out.pairs.size() > 2) {
        double sum = 0.0;
        for (const MatchedPair& p : out.pairs) sum += p.distance;

        std::vector<MatchedPair> kept;
        kept.reserve(out.pairs.size());
        for (const MatchedPair& p : out.pairs) {
            const double mean_others =
                (sum - p.distance) / static_cast<double>(out.pairs.size() - 1);
            bool gross = false;
            if (p.distance > t1) {
                if (mean_others > 0.0) {
                    gross = (p.distance - mean_others) / mean_others * 100.0 > t2;
                } else {
                    gross = true;  // others are exact hits, this one is not
                }
            }
            if (!gross) kept.push_back(p);
        }
        if (kept.size() == out.pairs.size()) break;
        out.pairs = std::move(kept);
    }
    return out;
}

}  // namespace mvrp
