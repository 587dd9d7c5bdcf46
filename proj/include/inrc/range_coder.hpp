#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "inrc/entropy_model.hpp"

namespace inrc {

// Entropy-coded symbol payload. Carries no self-describing header; the
// container supplies the table and the symbol count.
struct CodedPayload {
    std::vector<uint8_t> bytes;
    int64_t n_symbols = 0;
};

// Static-table stream coder (asymmetric numeral systems, 64-bit state,
// 32-bit renormalization words, 16-bit probabilities). Lossless and
// deterministic; output is byte-aligned. Flush overhead is the 8-byte
// final state.
CodedPayload rans_encode(std::span<const int32_t> symbols, const FrequencyTable& table);

// Exact inverse given the identical table. Throws CorruptDataError on a
// truncated payload; a payload encoded under a different table decodes to
// wrong symbols without failing (not detectable in general).
std::vector<int32_t> rans_decode(const CodedPayload& payload, const FrequencyTable& table,
                                 int64_t n_symbols);

}  // namespace inrc
