#include "inrc/range_coder.hpp"

#include <stdexcept>

#include "inrc/common.hpp"

namespace inrc {

namespace {

constexpr uint64_t kStateLow = 1ull << 31;  // state stays in [kStateLow, 2^63)

void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

}  // namespace

CodedPayload rans_encode(std::span<const int32_t> symbols, const FrequencyTable& table) {
    for (int32_t s : symbols)
        if (!table.contains(s)) throw std::invalid_argument("rans_encode: symbol outside alphabet");

    // Symbols are folded in reverse so the decoder emits them in order.
    uint64_t x = kStateLow;
    std::vector<uint32_t> words;
    for (size_t i = symbols.size(); i-- > 0;) {
        const uint32_t f = table.freq(symbols[i]);
        const uint32_t c = table.cum(symbols[i]);
        const uint64_t x_max = (static_cast<uint64_t>(f)) << (31 - kTablePrecisionBits + 32);
        if (x >= x_max) {
            words.push_back(static_cast<uint32_t>(x));
            x >>= 32;
        }
        x = ((x / f) << kTablePrecisionBits) + (x % f) + c;
    }

    CodedPayload payload;
    payload.n_symbols = static_cast<int64_t>(symbols.size());
    payload.bytes.reserve(8 + 4 * words.size());
    put_u32_be(payload.bytes, static_cast<uint32_t>(x >> 32));
    put_u32_be(payload.bytes, static_cast<uint32_t>(x));
    for (size_t i = words.size(); i-- > 0;) put_u32_be(payload.bytes, words[i]);
    return payload;
}

std::vector<int32_t> rans_decode(const CodedPayload& payload, const FrequencyTable& table,
                                 int64_t n_symbols) {
    if (n_symbols < 0) throw std::invalid_argument("rans_decode: negative symbol count");
    std::vector<int32_t> symbols;
    if (n_symbols == 0) return symbols;
    const std::vector<uint8_t>& bytes = payload.bytes;
    if (bytes.size() < 8) throw CorruptDataError("rans_decode: payload shorter than coder state");

    auto get_u32_be = [&bytes](size_t at) {
        return (static_cast<uint32_t>(bytes[at]) << 24) | (static_cast<uint32_t>(bytes[at + 1]) << 16) |
               (static_cast<uint32_t>(bytes[at + 2]) << 8) | static_cast<uint32_t>(bytes[at + 3]);
    };
    uint64_t x = (static_cast<uint64_t>(get_u32_be(0)) << 32) | get_u32_be(4);
    size_t at = 8;

    // Slot -> symbol index lookup over the full 16-bit range.
    std::vector<uint16_t> slot_to_sym(kTableTotal);
    for (size_t i = 0, slot = 0; i < table.freqs.size(); ++i)
        for (uint32_t n = 0; n < table.freqs[i]; ++n)
            slot_to_sym[slot++] = static_cast<uint16_t>(i);

    symbols.resize(static_cast<size_t>(n_symbols));
    const uint32_t mask = kTableTotal - 1;
    for (int64_t i = 0; i < n_symbols; ++i) {
        const uint32_t slot = static_cast<uint32_t>(x) & mask;
        const uint16_t idx = slot_to_sym[slot];
        symbols[static_cast<size_t>(i)] = table.min_symbol + static_cast<int32_t>(idx);
        x = static_cast<uint64_t>(table.freqs[idx]) * (x >> kTablePrecisionBits) +
            (slot - table.cumulative[idx]);
        if (x < kStateLow) {
            if (at + 4 > bytes.size())
                throw CorruptDataError("rans_decode: payload truncated");
            x = (x << 32) | get_u32_be(at);
            at += 4;
        }
    }
    return symbols;
}

}  // namespace inrc
