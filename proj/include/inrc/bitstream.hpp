#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "inrc/entropy_model.hpp"
#include "inrc/image.hpp"
#include "inrc/quantizer.hpp"

namespace inrc {

// Wire format, all multi-octet integers big-endian, version 1:
//   magic "RQAT" | version u8 | q u8 | width u16 | height u16 | L u8
//   | (L+1) x u16 layer dims | L x f16 weight scales | L x f16 bias scales
//   | f16 mu | f16 sigma | u32 payload length | payload
// Side information is exactly 2L*16 + 32 bits (scales + model).

inline constexpr std::array<uint8_t, 4> kMagic = {'R', 'Q', 'A', 'T'};
inline constexpr uint8_t kVersion = 1;

// IEEE 754 binary16, big-endian octet order. Encoding rounds to nearest
// even and saturates past the finite range; NaN throws invalid_argument.
std::array<uint8_t, 2> encode_f16(double value);
double decode_f16(std::span<const uint8_t> bytes);

// Parsed fixed-size portion of a stream.
struct StreamHeader {
    int version = 0;
    int q = 0;
    int width = 0;
    int height = 0;
    std::vector<int> layer_dims;
    std::vector<double> weight_absmax;
    std::vector<double> bias_absmax;
    double mu = 0.0;
    double sigma = 0.0;
    uint32_t payload_byte_len = 0;
    size_t header_bytes = 0;  // offset of the payload

    int layer_count() const { return static_cast<int>(layer_dims.size()) - 1; }
    int64_t symbol_count() const;
    int64_t side_info_bits() const { return 2 * static_cast<int64_t>(layer_count()) * 16 + 32; }
};

StreamHeader read_header(std::span<const uint8_t> bytes);

// Pools all weight symbols (layer order) then all bias symbols, fits the
// entropy model, and entropy-codes that sequence. Deterministic.
std::vector<uint8_t> serialize(const QuantizedNetwork& qnet, int width, int height);

struct DecodedStream {
    QuantizedNetwork qnet;
    int width = 0;
    int height = 0;
};

// Exact inverse of serialize: rebuilds the frequency table from the
// decoded header with the encoder's procedure, decodes the symbols, and
// splits them back into per-layer groups.
DecodedStream deserialize(std::span<const uint8_t> bytes);

// Fig-style decoding pipeline: deserialize, dequantize, evaluate the
// network on the pixel grid, clamp to [0, 1].
ImageBuffer decode_image(std::span<const uint8_t> bytes, double w0 = 30.0);

// The model/table pair serialize commits to; exposed so tools and tests
// can account for rate and compare decoder-side tables.
struct EntropyPlan {
    std::vector<int32_t> symbols;  // transmission order
    BorderAwareModel model;
    FrequencyTable table;
};

EntropyPlan entropy_plan(const QuantizedNetwork& qnet);

}  // namespace inrc
