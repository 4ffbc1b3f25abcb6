#pragma once

#include <stdexcept>
#include <string>

namespace hf {

/// Dimension mismatch between matrices/vectors. The message names both shapes.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Invalid argument value (bad bounds, out-of-range fraction, unknown name).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input file problem: missing file, malformed row, range violation in strict
/// mode. The message carries the row number where one applies.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite value where a finite one is required, or a failed numerical check.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hf
