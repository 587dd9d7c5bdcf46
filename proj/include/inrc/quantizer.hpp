#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "inrc/siren.hpp"

namespace inrc {

inline constexpr int kMinBits = 2;
inline constexpr int kMaxBits = 15;

// Largest symbol magnitude for q-bit quantization: 2^(q-1) - 1.
int k_of(int q);

// Fixed-bit network representation: per-layer integer symbols in [-k, k]
// plus one binary16 scale (the rounded-up absolute maximum) per group,
// where a group is one layer's weights or one layer's biases.
struct QuantizedNetwork {
    std::vector<int> layer_dims;
    int q = 8;
    std::vector<std::vector<int32_t>> weight_symbols;
    std::vector<std::vector<int32_t>> bias_symbols;
    std::vector<double> weight_absmax;  // binary16-exact values
    std::vector<double> bias_absmax;

    int layer_count() const { return static_cast<int>(weight_symbols.size()); }
    int64_t symbol_count() const;
    void validate() const;
};

struct QuantizedGroup {
    std::vector<int32_t> symbols;
    double absmax = 0.0;  // binary16-exact, rounded toward +infinity
};

// absmax = max|values| rounded up to binary16 (never below the true
// maximum); symbols = clamp(round-half-away(values / absmax * k), -k, k).
// An all-zero group stores absmax 0 and all-zero symbols; groups whose
// maximum falls below the binary16 normal range are treated the same way.
// Every group with nonzero absmax contains a symbol of magnitude k.
QuantizedGroup quantize_group(std::span<const double> values, int q);

// Elementwise symbols / k * absmax.
std::vector<double> dequantize_group(std::span<const int32_t> symbols, double absmax, int q);

// quantize_group then dequantize_group in one call. The training loop
// treats its Jacobian as identity (straight-through).
std::vector<double> fake_quantize_group(std::span<const double> values, int q);

// Applies quantize_group to each layer's weights and biases (2L groups).
QuantizedNetwork quantize_network(const SirenNetwork& net, int q);

// Rebuilds the full-precision-typed network from symbols and scales.
// w0 is codec configuration, not part of the quantized representation.
SirenNetwork dequantize_network(const QuantizedNetwork& qnet, double w0);

}  // namespace inrc
