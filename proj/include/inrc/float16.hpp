#pragma once

#include <cstdint>

namespace inrc {

// IEEE 754 binary16 conversion helpers. Encoding is exact-by-construction:
// the mantissa is derived from power-of-two scalings of the input, so the
// rounding decision is made on an exactly representable intermediate.
//
// Values whose magnitude would round to infinity saturate to +-65504
// (the largest finite half); NaN input throws std::invalid_argument.

// Round to nearest, ties to even. The serialization default.
uint16_t f16_from_double(double v);

// Round toward +infinity. Used for quantizer scales, which must never be
// stored below the true group maximum. Requires v >= 0 and v <= 65504.
uint16_t f16_from_double_round_up(double v);

// Exact (binary16 is a subset of binary64).
double double_from_f16(uint16_t bits);

// Convenience: value -> nearest binary16 -> back. Idempotent.
inline double round_to_f16(double v) { return double_from_f16(f16_from_double(v)); }
inline double round_up_to_f16(double v) { return double_from_f16(f16_from_double_round_up(v)); }

inline constexpr double kF16Max = 65504.0;
inline constexpr double kF16MinNormal = 6.103515625e-05;  // 2^-14

}  // namespace inrc
