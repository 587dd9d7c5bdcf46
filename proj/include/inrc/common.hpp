#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace inrc {

// Error taxonomy shared by the whole codec. Callers that need to map
// failures to process exit codes can catch these by base class.
struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed container (bad magic, unknown version).
struct FormatError : CodecError {
    using CodecError::CodecError;
};

// Well-formed container whose contents violate an invariant, or a payload
// that cannot be decoded.
struct CorruptDataError : CodecError {
    using CodecError::CodecError;
};

// Valid request that this build cannot serve (e.g. alphabet too large).
struct UnsupportedError : CodecError {
    using CodecError::CodecError;
};

// Non-finite value produced inside numerical kernels.
struct NumericError : CodecError {
    using CodecError::CodecError;
};

// Optimization failed (diverged); message carries the iteration index.
struct TrainingError : CodecError {
    using CodecError::CodecError;
};

}  // namespace inrc
