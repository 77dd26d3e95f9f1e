#pragma once

#include <stdexcept>

namespace hyperdolphin {

/// Invalid argument values: non-positive widths, probabilities out of range,
/// thresholds of zero, out-of-domain inputs.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Mismatched dimensions between points, hash functions and datasets.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed, truncated or inconsistent files (vecs payloads, index files).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem-level failures (missing paths, unwritable targets).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hyperdolphin
