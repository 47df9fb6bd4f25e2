#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mvrp/errors.hpp"

namespace mvrp {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Six-component relative pose of the tanker expressed in the UAV frame:
/// position in meters, attitude (heading, pitch, roll) in degrees.
struct PoseVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double psi = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

/// 4x4 homogeneous transform. Bottom row is always (0,0,0,1).
struct RigidTransform {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
};

enum class Axis { X, Y, Z };

/// Pinhole parameters in pixels plus the camera mount pitch on the UAV.
struct CameraIntrinsics {
    double f_x = 0.0;
    double f_y = 0.0;
    double u0 = 0.0;
    double v0 = 0.0;
    int width = 0;
    int height = 0;
    double alpha = 0.0;  // degrees, camera pitch relative to the UAV body
};

/// Known 3-D beacon position in the tanker reference frame, meters.
struct FeaturePoint3D {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Continuous image-plane point. Projected points carry the feature id;
/// extracted points do not. When the source 3-D point has non-positive
/// camera depth, u and v are NaN and visible is false; callers must check
/// visible before using the coordinates.
struct PixelPoint {
    double u = std::numeric_limits<double>::quiet_NaN();
    double v = std::numeric_limits<double>::quiet_NaN();
    std::optional<int> id;
    bool visible = false;
};

/// Right-handed rotation by beta degrees about the given axis,
/// counter-clockwise seen from the axis' positive end:
/// rotation_about_axis(90, Z) maps (1,0,0) to (0,1,0).
inline RigidTransform rotation_about_axis(double beta_deg, Axis axis) {
    const double b = deg_to_rad(beta_deg);
    const double c = std::cos(b);
    const double s = std::sin(b);
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    switch (axis) {
        case Axis::X:
            m(1, 1) = c; m(1, 2) = -s;
            m(2, 1) = s; m(2, 2) = c;
            break;
        case Axis::Y:
            m(0, 0) = c;  m(0, 2) = s;
            m(2, 0) = -s; m(2, 2) = c;
            break;
        case Axis::Z:
            m(0, 0) = c; m(0, 1) = -s;
            m(1, 0) = s; m(1, 1) = c;
            break;
    }
    return {m};
}

/// Fixed UAV-to-camera axis permutation: x_C = x_U, y_C = -z_U, z_C = y_U
/// (optical axis along the UAV's longitudinal axis, image y pointing down).
inline RigidTransform axis_permutation() {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m(1, 1) = 0.0; m(1, 2) = -1.0;
    m(2, 1) = 1.0; m(2, 2) = 0.0;
    return {m};
}

/// Extrinsic transform M with FP_C = M * FP_T. Tanker-frame points are
/// rotated by the tanker attitude (heading about Z, pitch about X, roll
/// about Y), translated to the tanker position in the UAV frame, expressed
/// in the pitched camera mount frame (the inverse of the mount rotation by
/// alpha about the UAV X axis), and finally permuted into camera axes.
inline RigidTransform extrinsic_from_pose(const PoseVector& pose,
                                          const CameraIntrinsics& intr) {
    Eigen::Matrix4d translate = Eigen::Matrix4d::Identity();
    translate(0, 3) = pose.x;
    translate(1, 3) = pose.y;
    translate(2, 3) = pose.z;

    const Eigen::Matrix4d attitude = rotation_about_axis(pose.psi, Axis::Z).m *
                                     rotation_about_axis(pose.theta, Axis::X).m *
                                     rotation_about_axis(pose.phi, Axis::Y).m;
    const Eigen::Matrix4d mount = rotation_about_axis(-intr.alpha, Axis::X).m;
    return {axis_permutation().m * mount * translate * attitude};
}

/// Pinhole projection of one feature point through an extrinsic transform.
/// visible is true iff the camera depth is positive and the pixel lies
/// inside the image rectangle.
inline PixelPoint project_point(const CameraIntrinsics& intr,
                                const RigidTransform& extrinsic,
                                const FeaturePoint3D& fp) {
    const Eigen::Vector4d pc = extrinsic.m * Eigen::Vector4d(fp.x, fp.y, fp.z, 1.0);
    PixelPoint out;
    out.id = fp.id;
    if (!(pc.z() > 0.0)) {
        return out;  // behind the camera; u,v stay NaN
    }
    out.u = intr.f_x * pc.x() / pc.z() + intr.u0;
    out.v = intr.f_y * pc.y() / pc.z() + intr.v0;
    out.visible = out.u >= 0.0 && out.u < static_cast<double>(intr.width) &&
                  out.v >= 0.0 && out.v < static_cast<double>(intr.height);
    return out;
}

/// Projects every feature point at the given pose. Returns one PixelPoint
/// per input point, in input order, each carrying its id and visibility.
inline std::vector<PixelPoint> project_visible_set(
    const CameraIntrinsics& intr, const PoseVector& pose,
    const std::vector<FeaturePoint3D>& pfps) {
    const RigidTransform m = extrinsic_from_pose(pose, intr);
    std::vector<PixelPoint> out;
    out.reserve(pfps.size());
    for (const FeaturePoint3D& fp : pfps) {
        out.push_back(project_point(intr, m, fp));
    }
    return out;
}

/// Intrinsics from a vertical field of view, assuming square pixels and a
/// centered principal point.
inline CameraIntrinsics intrinsics_from_fov(double fov_y_deg, int width,
                                            int height, double alpha_deg) {
    if (!(fov_y_deg > 0.0) || !(fov_y_deg < 180.0)) {
        throw InvalidFov("vertical fov must lie in (0, 180) degrees, got " +
                         std::to_string(fov_y_deg));
    }
    CameraIntrinsics intr;
    intr.f_y = (static_cast<double>(height) / 2.0) / std::tan(deg_to_rad(fov_y_deg) / 2.0);
    intr.f_x = intr.f_y;
    intr.u0 = static_cast<double>(width) / 2.0;
    intr.v0 = static_cast<double>(height) / 2.0;
    intr.width = width;
    intr.height = height;
    intr.alpha = alpha_deg;
    return intr;
}

/// Loads a feature point table: one `id x y z` line per point (meters),
/// `#` starts a comment. Ids must be unique.
inline std::vector<FeaturePoint3D> load_pfps(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open feature point table: " + path);
    }
    std::vector<FeaturePoint3D> out;
    std::set<int> ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        FeaturePoint3D fp;
        if (!(ls >> fp.id)) {
            continue;  // blank or comment-only line
        }
        if (!(ls >> fp.x >> fp.y >> fp.z)) {
            throw FormatError(path + ":" + std::to_string(line_no) +
                              ": expected `id x y z`");
        }
        if (!ids.insert(fp.id).second) {
            throw FormatError(path + ":" + std::to_string(line_no) +
                              ": duplicate feature point id " + std::to_string(fp.id));
        }
        out.push_back(fp);
    }
    return out;
}

}  // namespace mvrp
