#pragma once

#include <stdexcept>
#include <string>

namespace mvrp {

/// File could not be opened, read or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed on-disk data (bad magic, bad header field, truncated payload).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vertical field of view outside (0, 180) degrees.
struct InvalidFov : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Image smaller than the detector footprint.
struct ImageTooSmall : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A matched feature point projects with non-positive camera depth.
struct BehindCamera : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fewer than three matched pairs; the pose is not estimable.
struct InsufficientPoints : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Initial value requested from a previous estimate that does not exist.
struct MissingPrevious : std::logic_error {
    using std::logic_error::logic_error;
};

/// An aggregate operation was handed no data.
struct EmptyInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace mvrp
