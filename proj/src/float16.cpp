#include "inrc/float16.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace inrc {

namespace {

// Shared mantissa/exponent assembly. `round` maps an exactly-scaled
// significand offset in [0, 1024) (normals) or a scaled magnitude in
// [0, 1024) (subnormals) to an integer mantissa.
template <typename RoundFn>
uint16_t encode(double v, RoundFn round) {
    if (std::isnan(v)) throw std::invalid_argument("f16: NaN is not encodable");
    const uint16_t sign = std::signbit(v) ? 0x8000u : 0u;
    double a = std::fabs(v);
    if (a == 0.0) return sign;
    if (std::isinf(v)) return sign | 0x7BFFu;  // saturate

    int e2 = 0;
    std::frexp(a, &e2);       // a = fr * 2^e2, fr in [0.5, 1)
    int ue = e2 - 1;          // unbiased exponent, a = s * 2^ue with s in [1, 2)

    long mant;
    if (ue < -14) {
        // Subnormal range: quantum 2^-24. a * 2^24 is exact.
        mant = round(std::ldexp(a, 24));
        if (mant == 0) return sign;
        if (mant < 1024) return static_cast<uint16_t>(sign | mant);
        ue = -14;  // rounded up into the smallest normal
        mant = 0;
    } else {
        // s - 1 is exact (both in [1, 2)); * 1024 is exact.
        const double s = std::ldexp(a, -ue);
        mant = round((s - 1.0) * 1024.0);
        if (mant == 1024) {  // mantissa overflow bumps the exponent
            mant = 0;
            ++ue;
        }
    }
    if (ue > 15) return sign | 0x7BFFu;  // saturate instead of infinity
    return static_cast<uint16_t>(sign | ((ue + 15) << 10) | mant);
}

}  // namespace

uint16_t f16_from_double(double v) {
    // nearbyint honours the default round-to-nearest-even mode.
    return encode(v, [](double x) { return static_cast<long>(std::nearbyint(x)); });
}

uint16_t f16_from_double_round_up(double v) {
    if (std::isnan(v)) throw std::invalid_argument("f16: NaN is not encodable");
    if (v < 0.0) throw std::invalid_argument("f16: round-up mode expects a nonnegative value");
    if (v > kF16Max) throw std::invalid_argument("f16: value exceeds binary16 range");
    return encode(v, [](double x) { return static_cast<long>(std::ceil(x)); });
}

double double_from_f16(uint16_t bits) {
    const double sign = (bits & 0x8000u) ? -1.0 : 1.0;
    const int eb = (bits >> 10) & 0x1F;
    const int mant = bits & 0x3FF;
    if (eb == 0) return sign * std::ldexp(static_cast<double>(mant), -24);
    if (eb == 31) {
        if (mant != 0) return std::nan("");
        return sign * std::numeric_limits<double>::infinity();
    }
    return sign * std::ldexp(1024.0 + mant, eb - 15 - 10);
}

}  // namespace inrc
