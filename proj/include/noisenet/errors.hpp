#pragma once

#include <stdexcept>
#include <string>

namespace noisenet {

// Thrown when vector/matrix dimensions do not line up.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file (bad magic, inconsistent counts, ...).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failure (missing file, short read, write error).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid noise/pool/sweep specification (e.g. layer index out of range).
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values encountered during computation.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace noisenet
