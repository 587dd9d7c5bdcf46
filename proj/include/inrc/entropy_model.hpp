#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace inrc {

// Symbol distribution used for coding: fixed mass L/n_params at each of
// the extreme symbols -k and +k (every layer group contributes at least
// one full-scale symbol), and a renormalized pointwise Gaussian over the
// interior [-(k-1), k-1].
struct BorderAwareModel {
    double mu = 0.0;     // binary16-exact
    double sigma = 0.1;  // binary16-exact, >= sigma_floor()
    int64_t n_layers = 1;
    int64_t n_params = 0;  // total symbol count
    int k = 127;

    bool operator==(const BorderAwareModel&) const = default;
    void validate() const;
};

// Smallest binary16 value >= 0.1. Stored sigmas are floored here so the
// degenerate constant-interior case stays encodable while the transmitted
// value round-trips binary16 exactly.
double sigma_floor();

// Fits (mu, sigma) to the symbols whose value is strictly inside the
// borders, rounds both to binary16, and applies the sigma floor. An empty
// interior yields mu = 0, sigma = sigma_floor().
BorderAwareModel estimate(std::span<const int32_t> symbols, int64_t n_layers, int k);

// Probability of one symbol under the model. Total function over the
// integers: zero outside [-k, k]. The interior normalizer is accumulated
// in a fixed left-to-right order (compensated), so encoder and decoder
// sides agree bit-exactly.
double pmf(const BorderAwareModel& model, int x);

// Ideal code length in bits: sum over symbols of -log2 pmf. Invariant
// under permutation of the symbol stream.
double rate(const BorderAwareModel& model, std::span<const int32_t> symbols);

// Integer CDF for the coder: per-symbol frequencies over [-k, k] summing
// to exactly 2^16, each >= 1.
struct FrequencyTable {
    int precision_bits = 16;
    int min_symbol = 0;               // = -k
    std::vector<uint32_t> freqs;      // size 2k + 1
    std::vector<uint32_t> cumulative; // size 2k + 2, strictly increasing

    int alphabet_size() const { return static_cast<int>(freqs.size()); }
    bool contains(int32_t symbol) const {
        return symbol >= min_symbol && symbol < min_symbol + alphabet_size();
    }
    uint32_t freq(int32_t symbol) const { return freqs[symbol - min_symbol]; }
    uint32_t cum(int32_t symbol) const { return cumulative[symbol - min_symbol]; }
    bool operator==(const FrequencyTable&) const = default;
};

inline constexpr uint32_t kTablePrecisionBits = 16;
inline constexpr uint32_t kTableTotal = 1u << kTablePrecisionBits;

// Deterministic quantization of the model to integer frequencies:
// freq = max(1, floor(pmf * 2^16)), then the deficit against 2^16 is
// settled on the largest-frequency symbol (ties toward the smaller symbol
// value), spilling to the next-largest when a subtraction would drop a
// frequency below 1. Identical inputs give bit-identical tables.
FrequencyTable build_frequency_table(const BorderAwareModel& model);

}  // namespace inrc
