#pragma once

#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mvrp/correspondence.hpp"
#include "mvrp/errors.hpp"
#include "mvrp/geometry.hpp"

namespace mvrp {

struct SolverConfig {
    int max_iterations = 100;
    double lambda0 = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    double step_tol = 1e-8;       // on the 6-vector step norm
    double residual_tol = 1e-10;  // relative decrease of the squared residual
    double fd_step_pos = 1e-4;    // meters
    double fd_step_ang = 1e-4;    // degrees
};

struct PoseEstimate {
    PoseVector pose;
    double rms_residual = 0.0;  // pixels, over all residual entries
    int iterations = 0;
    bool converged = false;
    int n_m = 0;
};

using Vector6d = Eigen::Matrix<double, 6, 1>;

inline Vector6d pose_to_vec(const PoseVector& p) {
    Vector6d v;
    v << p.x, p.y, p.z, p.psi, p.theta, p.phi;
    return v;
}

inline PoseVector vec_to_pose(const Vector6d& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

/// Stacked reprojection residual (u_E - u_p, v_E - v_p) per matched pair in
/// pfp_id order; length 2*N_M, pixels. Throws BehindCamera when a matched
/// feature point has non-positive camera depth at the queried pose.
inline Eigen::VectorXd reprojection_residual(const PoseVector& pose,
                                             const MatchSet& matches,
                                             const CameraIntrinsics& intr,
                                             const std::vector<FeaturePoint3D>& pfps) {
    const RigidTransform m = extrinsic_from_pose(pose, intr);
    Eigen::VectorXd r(2 * matches.size());
    int row = 0;
    for (const MatchedPair& pair : matches.pairs) {
        const FeaturePoint3D* fp = nullptr;
        for (const FeaturePoint3D& candidate : pfps) {
            if (candidate.id == pair.pfp_id) {
                fp = &candidate;
                break;
            }
        }
        if (fp == nullptr) {
            throw std::invalid_argument("matched feature id " + std::to_string(pair.pfp_id) +
                                        " missing from the feature point table");
        }
        const PixelPoint p = project_point(intr, m, *fp);
        if (std::isnan(p.u)) {
            throw BehindCamera("feature " + std::to_string(pair.pfp_id) +
                               " behind the camera at the queried pose");
        }
        r[row++] = pair.extracted.u - p.u;
        r[row++] = pair.extracted.v - p.v;
    }
    return r;
}

/// Central-difference Jacobian of the reprojection residual, 2*N_M x 6.
/// Columns 1-3 use fd_step_pos (meters), columns 4-6 fd_step_ang (degrees).
inline Eigen::MatrixXd numeric_jacobian(const PoseVector& pose, const MatchSet& matches,
                                        const CameraIntrinsics& intr,
                                        const std::vector<FeaturePoint3D>& pfps,
                                        const SolverConfig& cfg = {}) {
    Eigen::MatrixXd jac(2 * matches.size(), 6);
    const Vector6d x = pose_to_vec(pose);
    for (int j = 0; j < 6; ++j) {
        const double h = j < 3 ? cfg.fd_step_pos : cfg.fd_step_ang;
        Vector6d xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        jac.col(j) = (reprojection_residual(vec_to_pose(xp), matches, intr, pfps) -
                      reprojection_residual(vec_to_pose(xm), matches, intr, pfps)) /
                     (2.0 * h);
    }
    return jac;
}

struct LmTrace {
    Vector6d x = Vector6d::Zero();
    double ssr = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Levenberg-Marquardt on a generic residual functor
/// f: Vector6d -> std::optional<Eigen::VectorXd> (nullopt = not evaluable;
/// such trial steps are rejected). Damped normal equations with diagonal
/// scaling; a step is accepted only when the squared residual strictly
/// decreases. accepted_ssr, when given, records the accepted residual
/// sequence including the initial value.
template <class ResidualFn>
LmTrace lm_minimize(const ResidualFn& f, const Vector6d& x0, const SolverConfig& cfg,
                    std::vector<double>* accepted_ssr = nullptr) {
    assert(cfg.lambda_up > 1.0 && cfg.lambda_down > 0.0 && cfg.lambda_down < 1.0);
    assert(cfg.lambda0 > 0.0 && cfg.step_tol > 0.0 && cfg.residual_tol > 0.0);
    assert(cfg.fd_step_pos > 0.0 && cfg.fd_step_ang > 0.0);
    LmTrace tr;
    tr.x = x0;
    const std::optional<Eigen::VectorXd> r0 = f(x0);
    if (!r0) {
        throw BehindCamera("residual not evaluable at the initial pose");
    }
    Eigen::VectorXd r = *r0;
    tr.ssr = r.squaredNorm();
    if (accepted_ssr) accepted_ssr->push_back(tr.ssr);
    if (tr.ssr == 0.0) {
        tr.converged = true;
        return tr;
    }

    double lambda = cfg.lambda0;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        tr.iterations = it;

        Eigen::MatrixXd jac(r.size(), 6);
        bool jac_ok = true;
        for (int j = 0; j < 6 && jac_ok; ++j) {
            const double h = j < 3 ? cfg.fd_step_pos : cfg.fd_step_ang;
            Vector6d xp = tr.x, xm = tr.x;
            xp[j] += h;
            xm[j] -= h;
            const auto rp = f(xp);
            const auto rm = f(xm);
            if (!rp || !rm) {
                jac_ok = false;
                break;
            }
            jac.col(j) = (*rp - *rm) / (2.0 * h);
        }
        if (!jac_ok) return tr;  // cannot differentiate here

        const Eigen::Matrix<double, 6, 6> normal = jac.transpose() * jac;
        const Vector6d gradient = jac.transpose() * r;

        bool accepted = false;
        while (lambda <= 1e14) {
            Eigen::Matrix<double, 6, 6> damped = normal;
            for (int d = 0; d < 6; ++d) {
                damped(d, d) += lambda * std::max(normal(d, d), 1e-12);
            }
            const Vector6d step = damped.ldlt().solve(-gradient);
            if (!step.allFinite()) {
                lambda *= cfg.lambda_up;
                continue;
            }
            const Vector6d trial = tr.x + step;
            const auto rt = f(trial);
            const bool improves = rt && rt->squaredNorm() < tr.ssr;
            if (improves) {
                const double trial_ssr = rt->squaredNorm();
                const double rel_decrease = (tr.ssr - trial_ssr) / tr.ssr;
                tr.x = trial;
                r = *rt;
                tr.ssr = trial_ssr;
                if (accepted_ssr) accepted_ssr->push_back(tr.ssr);
                lambda = std::max(lambda * cfg.lambda_down, 1e-16);
                accepted = true;
                if (step.norm() < cfg.step_tol || rel_decrease < cfg.residual_tol ||
                    tr.ssr == 0.0) {
                    tr.converged = true;
                }
                break;
            }
            if (step.norm() < cfg.step_tol) {
                // No improving direction and the proposal is already below the
                // step tolerance: the iterate is at a minimum.
                tr.converged = true;
                break;
            }
            lambda *= cfg.lambda_up;
        }
        if (!accepted || tr.converged) return tr;  // stalled or done
    }
    return tr;  // max_iterations exhausted, converged stays false
}

/// Pose estimate from matched correspondences. Requires N_M >= 3. A result
/// that hits max_iterations is returned with converged = false.
inline PoseEstimate lm_solve(const PoseVector& init, const MatchSet& matches,
                             const CameraIntrinsics& intr,
                             const std::vector<FeaturePoint3D>& pfps,
                             const SolverConfig& cfg = {}) {
    if (matches.size() < 3) {
        throw InsufficientPoints("pose estimation needs at least 3 matched pairs, got " +
                                 std::to_string(matches.size()));
    }
    auto fn = [&](const Vector6d& x) -> std::optional<Eigen::VectorXd> {
        try {
            return reprojection_residual(vec_to_pose(x), matches, intr, pfps);
        } catch (const BehindCamera&) {
            return std::nullopt;
        }
    };
    const LmTrace tr = lm_minimize(fn, pose_to_vec(init), cfg);
    PoseEstimate est;
    est.pose = vec_to_pose(tr.x);
    est.rms_residual = std::sqrt(tr.ssr / (2.0 * matches.size()));
    est.iterations = tr.iterations;
    est.converged = tr.converged;
    est.n_m = matches.size();
    return est;
}

/// Initial value policy: the external prior for the first sample, the
/// previous estimate afterwards.
inline PoseVector initial_pose(int k, const std::optional<PoseEstimate>& previous,
                               const PoseVector& prior) {
    if (k < 1) {
        throw std::invalid_argument("sample index must be >= 1, got " + std::to_string(k));
    }
    if (k == 1) return prior;
    if (!previous) {
        throw MissingPrevious("no previous estimate available for sample " + std::to_string(k));
    }
    return previous->pose;
}

}  // namespace mvrp
