#include "inrc/bitstream.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "inrc/common.hpp"
#include "inrc/float16.hpp"
#include "inrc/range_coder.hpp"
#include "inrc/siren.hpp"

namespace inrc {

namespace {

void put_u16(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

struct Reader {
    std::span<const uint8_t> bytes;
    size_t at = 0;

    void need(size_t n) const {
        if (at + n > bytes.size()) throw CorruptDataError("stream: truncated header");
    }
    uint8_t u8() {
        need(1);
        return bytes[at++];
    }
    uint32_t u16() {
        need(2);
        const uint32_t v = (static_cast<uint32_t>(bytes[at]) << 8) | bytes[at + 1];
        at += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | bytes[at + i];
        return (at += 4), v;
    }
    double f16() {
        need(2);
        const double v = decode_f16(bytes.subspan(at, 2));
        at += 2;
        return v;
    }
};

}  // namespace

std::array<uint8_t, 2> encode_f16(double value) {
    const uint16_t bits = f16_from_double(value);
    return {static_cast<uint8_t>(bits >> 8), static_cast<uint8_t>(bits)};
}

double decode_f16(std::span<const uint8_t> bytes) {
    if (bytes.size() < 2) throw std::invalid_argument("decode_f16: need two octets");
    return double_from_f16(static_cast<uint16_t>((bytes[0] << 8) | bytes[1]));
}

int64_t StreamHeader::symbol_count() const {
    int64_t total = 0;
    for (int l = 0; l < layer_count(); ++l)
        total += static_cast<int64_t>(layer_dims[l]) * layer_dims[l + 1] + layer_dims[l + 1];
    return total;
}

EntropyPlan entropy_plan(const QuantizedNetwork& qnet) {
    EntropyPlan plan;
    plan.symbols.reserve(static_cast<size_t>(qnet.symbol_count()));
    for (const auto& group : qnet.weight_symbols)
        plan.symbols.insert(plan.symbols.end(), group.begin(), group.end());
    for (const auto& group : qnet.bias_symbols)
        plan.symbols.insert(plan.symbols.end(), group.begin(), group.end());
    plan.model = estimate(plan.symbols, qnet.layer_count(), k_of(qnet.q));
    plan.table = build_frequency_table(plan.model);
    return plan;
}

std::vector<uint8_t> serialize(const QuantizedNetwork& qnet, int width, int height) {
    qnet.validate();
    if (width < 1 || height < 1 || width > 0xFFFF || height > 0xFFFF)
        throw std::invalid_argument("serialize: image dimensions out of range");
    const int layers = qnet.layer_count();
    if (layers > 0xFF) throw UnsupportedError("serialize: too many layers");
    for (int d : qnet.layer_dims)
        if (d > 0xFFFF) throw UnsupportedError("serialize: layer dimension out of range");

    const EntropyPlan plan = entropy_plan(qnet);
    const CodedPayload payload = rans_encode(plan.symbols, plan.table);
    if (payload.bytes.size() > 0xFFFFFFFFull)
        throw UnsupportedError("serialize: payload exceeds 32-bit length field");

    std::vector<uint8_t> out;
    out.reserve(payload.bytes.size() + 64);
    for (uint8_t m : kMagic) out.push_back(m);
    out.push_back(kVersion);
    out.push_back(static_cast<uint8_t>(qnet.q));
    put_u16(out, static_cast<uint32_t>(width));
    put_u16(out, static_cast<uint32_t>(height));
    out.push_back(static_cast<uint8_t>(layers));
    for (int d : qnet.layer_dims) put_u16(out, static_cast<uint32_t>(d));
    auto put_f16 = [&out](double v) {
        const auto b = encode_f16(v);
        out.push_back(b[0]);
        out.push_back(b[1]);
    };
    for (double a : qnet.weight_absmax) put_f16(a);
    for (double a : qnet.bias_absmax) put_f16(a);
    put_f16(plan.model.mu);
    put_f16(plan.model.sigma);
    put_u32(out, static_cast<uint32_t>(payload.bytes.size()));
    out.insert(out.end(), payload.bytes.begin(), payload.bytes.end());
    return out;
}

StreamHeader read_header(std::span<const uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        throw FormatError("stream: bad magic");
    Reader r{bytes};
    StreamHeader h;
    r.at = 4;
    h.version = r.u8();
    if (h.version != kVersion) throw FormatError("stream: unsupported version");
    h.q = r.u8();
    if (h.q < kMinBits || h.q > kMaxBits) throw CorruptDataError("stream: bit depth out of range");
    h.width = static_cast<int>(r.u16());
    h.height = static_cast<int>(r.u16());
    if (h.width < 1 || h.height < 1) throw CorruptDataError("stream: bad dimensions");
    const int layers = r.u8();
    if (layers < 1) throw CorruptDataError("stream: no layers");
    h.layer_dims.resize(layers + 1);
    for (int& d : h.layer_dims) {
        d = static_cast<int>(r.u16());
        if (d < 1) throw CorruptDataError("stream: bad layer dimension");
    }
    h.weight_absmax.resize(layers);
    for (double& a : h.weight_absmax) a = r.f16();
    h.bias_absmax.resize(layers);
    for (double& a : h.bias_absmax) a = r.f16();
    h.mu = r.f16();
    h.sigma = r.f16();
    h.payload_byte_len = r.u32();
    h.header_bytes = r.at;
    return h;
}

DecodedStream deserialize(std::span<const uint8_t> bytes) {
    const StreamHeader h = read_header(bytes);
    if (h.header_bytes + h.payload_byte_len != bytes.size())
        throw CorruptDataError("stream: payload length mismatch");

    BorderAwareModel model;
    model.mu = h.mu;
    model.sigma = h.sigma;
    model.n_layers = h.layer_count();
    model.n_params = h.symbol_count();
    model.k = k_of(h.q);
    FrequencyTable table;
    try {
        table = build_frequency_table(model);
    } catch (const std::invalid_argument& e) {
        throw CorruptDataError(std::string("stream: unusable model parameters: ") + e.what());
    }

    CodedPayload payload;
    payload.bytes.assign(bytes.begin() + static_cast<ptrdiff_t>(h.header_bytes), bytes.end());
    payload.n_symbols = h.symbol_count();
    const std::vector<int32_t> symbols = rans_decode(payload, table, h.symbol_count());

    DecodedStream out;
    out.width = h.width;
    out.height = h.height;
    out.qnet.layer_dims = h.layer_dims;
    out.qnet.q = h.q;
    out.qnet.weight_absmax = h.weight_absmax;
    out.qnet.bias_absmax = h.bias_absmax;
    size_t at = 0;
    for (int l = 0; l < h.layer_count(); ++l) {
        const size_t n = static_cast<size_t>(h.layer_dims[l]) * h.layer_dims[l + 1];
        out.qnet.weight_symbols.emplace_back(symbols.begin() + at, symbols.begin() + at + n);
        at += n;
    }
    for (int l = 0; l < h.layer_count(); ++l) {
        const size_t n = static_cast<size_t>(h.layer_dims[l + 1]);
        out.qnet.bias_symbols.emplace_back(symbols.begin() + at, symbols.begin() + at + n);
        at += n;
    }
    out.qnet.validate();
    return out;
}

ImageBuffer decode_image(std::span<const uint8_t> bytes, double w0) {
    const DecodedStream stream = deserialize(bytes);
    const SirenNetwork net = dequantize_network(stream.qnet, w0);
    const CoordinateGrid grid = make_grid(stream.width, stream.height);
    const std::vector<double> pred = forward(net, grid);
    ImageBuffer image;
    image.width = stream.width;
    image.height = stream.height;
    image.pixels.resize(pred.size());
    for (size_t i = 0; i < pred.size(); ++i) image.pixels[i] = std::clamp(pred[i], 0.0, 1.0);
    return image;
}

}  // namespace inrc
