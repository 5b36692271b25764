#pragma once

#include <stdexcept>
#include <string>

namespace mechlab {

// Bad run configuration or malformed distribution spec.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested combination is outside the supported model (e.g. non-uniform D1/D2).
struct unsupported_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Root bracketing failures, missing thresholds, degenerate evaluations.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mechlab
