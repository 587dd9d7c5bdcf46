#include "inrc/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "inrc/common.hpp"
#include "inrc/float16.hpp"

namespace inrc {

int k_of(int q) {
    if (q < kMinBits || q > kMaxBits) throw std::invalid_argument("k_of: q outside supported range");
    return (1 << (q - 1)) - 1;
}

int64_t QuantizedNetwork::symbol_count() const {
    int64_t total = 0;
    for (size_t l = 0; l < weight_symbols.size(); ++l)
        total += static_cast<int64_t>(weight_symbols[l].size()) +
                 static_cast<int64_t>(bias_symbols[l].size());
    return total;
}

void QuantizedNetwork::validate() const {
    const int k = k_of(q);
    if (layer_dims.size() < 2 || layer_dims.front() != 2 || layer_dims.back() != 3)
        throw CorruptDataError("quantized network: bad layer dims");
    const size_t layers = layer_dims.size() - 1;
    if (weight_symbols.size() != layers || bias_symbols.size() != layers ||
        weight_absmax.size() != layers || bias_absmax.size() != layers)
        throw CorruptDataError("quantized network: layer count mismatch");
    auto check_group = [k](const std::vector<int32_t>& symbols, double absmax, size_t expected) {
        if (symbols.size() != expected) throw CorruptDataError("quantized network: symbol shape mismatch");
        if (!(absmax >= 0.0) || double_from_f16(f16_from_double(absmax)) != absmax)
            throw CorruptDataError("quantized network: absmax is not a binary16 value");
        int32_t peak = 0;
        for (int32_t s : symbols) {
            if (s < -k || s > k) throw CorruptDataError("quantized network: symbol out of range");
            peak = std::max(peak, std::abs(s));
        }
        if (absmax > 0.0 && peak != k)
            throw CorruptDataError("quantized network: nonzero group without a full-scale symbol");
        if (absmax == 0.0 && peak != 0)
            throw CorruptDataError("quantized network: zero-scale group with nonzero symbols");
    };
    for (size_t l = 0; l < layers; ++l) {
        const size_t in = layer_dims[l], out = layer_dims[l + 1];
        check_group(weight_symbols[l], weight_absmax[l], in * out);
        check_group(bias_symbols[l], bias_absmax[l], out);
    }
}

QuantizedGroup quantize_group(std::span<const double> values, int q) {
    const int k = k_of(q);
    double peak = 0.0;
    size_t peak_at = 0;
    for (size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw std::invalid_argument("quantize_group: non-finite value");
        if (std::fabs(values[i]) > peak) {
            peak = std::fabs(values[i]);
            peak_at = i;
        }
    }
    QuantizedGroup group;
    group.symbols.resize(values.size());
    if (peak == 0.0) return group;  // absmax 0, all symbols 0
    group.absmax = round_up_to_f16(peak);
    // Scales below the binary16 normal range have too coarse a grid to
    // normalize against; such groups are numerically zero at stream
    // precision and use the zero-group convention.
    if (group.absmax < kF16MinNormal) {
        group.absmax = 0.0;
        return group;
    }
    const double scale = static_cast<double>(k) / group.absmax;
    for (size_t i = 0; i < values.size(); ++i) {
        // std::round is round-half-away-from-zero
        const double r = std::round(values[i] * scale);
        group.symbols[i] = static_cast<int32_t>(std::clamp(r, -static_cast<double>(k),
                                                           static_cast<double>(k)));
    }
    // The maximal element normalizes to >= 1 - 2^-10 (one binary16 ulp of
    // round-up), which rounds to k whenever k <= 512; for larger k pin it
    // so every nonzero group carries a full-scale symbol, as the stream
    // format requires.
    if (std::abs(group.symbols[peak_at]) != k)
        group.symbols[peak_at] = values[peak_at] < 0.0 ? -k : k;
    return group;
}

std::vector<double> dequantize_group(std::span<const int32_t> symbols, double absmax, int q) {
    const int k = k_of(q);
    if (!(absmax >= 0.0)) throw CorruptDataError("dequantize_group: negative scale");
    std::vector<double> values(symbols.size());
    for (size_t i = 0; i < symbols.size(); ++i) {
        if (symbols[i] < -k || symbols[i] > k)
            throw CorruptDataError("dequantize_group: symbol out of range");
        values[i] = static_cast<double>(symbols[i]) / static_cast<double>(k) * absmax;
    }
    return values;
}

std::vector<double> fake_quantize_group(std::span<const double> values, int q) {
    const QuantizedGroup group = quantize_group(values, q);
    return dequantize_group(group.symbols, group.absmax, q);
}

QuantizedNetwork quantize_network(const SirenNetwork& net, int q) {
    net.validate();
    QuantizedNetwork qnet;
    qnet.layer_dims = net.layer_dims;
    qnet.q = q;
    const int layers = net.layer_count();
    for (int l = 0; l < layers; ++l) {
        QuantizedGroup w = quantize_group(net.weights[l], q);
        QuantizedGroup b = quantize_group(net.biases[l], q);
        qnet.weight_symbols.push_back(std::move(w.symbols));
        qnet.weight_absmax.push_back(w.absmax);
        qnet.bias_symbols.push_back(std::move(b.symbols));
        qnet.bias_absmax.push_back(b.absmax);
    }
    return qnet;
}

SirenNetwork dequantize_network(const QuantizedNetwork& qnet, double w0) {
    qnet.validate();
    SirenNetwork net;
    net.layer_dims = qnet.layer_dims;
    net.w0 = w0;
    for (int l = 0; l < qnet.layer_count(); ++l) {
        net.weights.push_back(dequantize_group(qnet.weight_symbols[l], qnet.weight_absmax[l], qnet.q));
        net.biases.push_back(dequantize_group(qnet.bias_symbols[l], qnet.bias_absmax[l], qnet.q));
    }
    net.validate();
    return net;
}

}  // namespace inrc
