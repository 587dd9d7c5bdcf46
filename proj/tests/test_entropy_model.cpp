#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "inrc/common.hpp"
#include "inrc/entropy_model.hpp"
#include "inrc/float16.hpp"
#include "inrc/quantizer.hpp"

using namespace inrc;

namespace {

BorderAwareModel model_of(double mu, double sigma, int64_t layers, int64_t n, int k) {
    BorderAwareModel m;
    m.mu = round_to_f16(mu);
    m.sigma = std::max(round_to_f16(sigma), sigma_floor());
    m.n_layers = layers;
    m.n_params = n;
    m.k = k;
    m.validate();
    return m;
}

// Test-side reimplementation of the table construction procedure.
FrequencyTable oracle_table(const BorderAwareModel& m) {
    std::vector<double> probs;
    for (int x = -m.k; x <= m.k; ++x) probs.push_back(pmf(m, x));
    FrequencyTable t;
    t.precision_bits = 16;
    t.min_symbol = -m.k;
    for (double p : probs)
        t.freqs.push_back(std::max<uint32_t>(1, static_cast<uint32_t>(std::floor(p * 65536.0))));
    int64_t total = 0;
    for (uint32_t f : t.freqs) total += f;
    int64_t deficit = 65536 - total;
    while (deficit != 0) {
        size_t best = 0;
        for (size_t i = 1; i < t.freqs.size(); ++i)
            if (t.freqs[i] > t.freqs[best]) best = i;
        if (deficit > 0) {
            t.freqs[best] += static_cast<uint32_t>(deficit);
            deficit = 0;
        } else {
            const int64_t take = std::min<int64_t>(-deficit, t.freqs[best] - 1);
            t.freqs[best] -= static_cast<uint32_t>(take);
            deficit += take;
            if (take == 0) break;  // cannot happen for valid sizes
        }
    }
    t.cumulative.push_back(0);
    for (uint32_t f : t.freqs) t.cumulative.push_back(t.cumulative.back() + f);
    return t;
}

double kahan_pmf_sum(const BorderAwareModel& m) {
    double sum = 0.0, c = 0.0;
    for (int x = -m.k; x <= m.k; ++x) {
        const double y = pmf(m, x) - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace

TEST_CASE("estimate: degenerate interior variance hits the sigma floor") {
    const std::vector<int32_t> symbols = {-127, 127, 0, 0, 0, 0};
    const BorderAwareModel m = estimate(symbols, 1, 127);
    CHECK(m.mu == 0.0);
    CHECK(m.sigma == sigma_floor());
    CHECK(m.n_params == 6);
}

TEST_CASE("estimate: hand-computed moments") {
    const std::vector<int32_t> symbols = {-127, 127, 1, -1, 3, -3};
    const BorderAwareModel m = estimate(symbols, 1, 127);
    CHECK(m.mu == 0.0);
    // population variance of {1,-1,3,-3} is 5; stored sigma is f16(sqrt(5))
    CHECK(m.sigma == round_to_f16(std::sqrt(5.0)));
}

TEST_CASE("estimate: empty interior convention") {
    const std::vector<int32_t> symbols(8, 127);
    const BorderAwareModel m = estimate(symbols, 1, 127);
    CHECK(m.mu == 0.0);
    CHECK(m.sigma == sigma_floor());

    CHECK_THROWS_AS(estimate(std::vector<int32_t>{}, 1, 127), std::invalid_argument);
    CHECK_THROWS_AS(estimate(std::vector<int32_t>{999}, 1, 127), std::invalid_argument);
}

TEST_CASE("sigma floor is a binary16 value not below 0.1") {
    CHECK(sigma_floor() >= 0.1);
    CHECK(round_to_f16(sigma_floor()) == sigma_floor());
}

TEST_CASE("pmf: border probability is the layer ratio exactly") {
    const BorderAwareModel m = model_of(0.0, 2.0, 2, 100, 127);
    CHECK(pmf(m, 127) == 0.02);
    CHECK(pmf(m, -127) == 0.02);
    CHECK(pmf(m, 128) == 0.0);
    CHECK(pmf(m, -200) == 0.0);
}

TEST_CASE("pmf sums to one and is nonnegative") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        const int k = k_of((trial % 2) ? 8 : 10);
        const double mu = std::uniform_real_distribution<double>(-20.0, 20.0)(rng);
        const double sigma = std::pow(10.0, std::uniform_real_distribution<double>(-1.0, 2.0)(rng));
        const int64_t L = 1 + static_cast<int64_t>(rng() % 8);
        const int64_t n = 2 * L + 1 + static_cast<int64_t>(rng() % 100000);
        const BorderAwareModel m = model_of(mu, sigma, L, n, k);
        for (int x : {-k, -k + 1, 0, k - 1, k}) CHECK(pmf(m, x) >= 0.0);
        CHECK(kahan_pmf_sum(m) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pmf interior ratios follow the Gaussian density") {
    const BorderAwareModel m = model_of(3.0, 4.0, 2, 5000, 127);
    auto density = [&](int x) {
        const double t = (x - m.mu) / m.sigma;
        return std::exp(-0.5 * t * t);
    };
    for (int t : {1, 2, 5, 17}) {
        const int base = 3;
        const double got = pmf(m, base) / pmf(m, base + t);
        const double want = density(base) / density(base + t);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("rate: exact one-bit and border cases") {
    // k = 1 with L/n = 1/4 puts exactly probability 1/2 on the single
    // interior symbol 0
    const BorderAwareModel half = model_of(0.0, 0.1, 1, 4, 1);
    CHECK(pmf(half, 0) == 0.5);
    CHECK(rate(half, std::vector<int32_t>{0}) == 1.0);

    // border pmf 1/256 -> 8 bits per occurrence
    const BorderAwareModel m = model_of(0.0, 1.0, 1, 256, 127);
    const std::vector<int32_t> ks(10, 127);
    CHECK(rate(m, ks) == doctest::Approx(80.0).epsilon(1e-14));

    CHECK_THROWS_AS(rate(m, std::vector<int32_t>{128}), std::invalid_argument);
}

TEST_CASE("rate matches the elementwise oracle and is permutation invariant") {
    std::mt19937_64 rng(7);
    const BorderAwareModel m = model_of(-1.5, 6.0, 3, 4000, 127);
    std::vector<int32_t> symbols;
    for (int i = 0; i < 20000; ++i)
        symbols.push_back(static_cast<int32_t>(rng() % 255) - 127);

    double oracle = 0.0;
    for (int32_t s : symbols) oracle += -std::log2(pmf(m, s));
    const double got = rate(m, symbols);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-9));

    std::shuffle(symbols.begin(), symbols.end(), rng);
    CHECK(rate(m, symbols) == got);

    // never below the stream's minimum possible self-information
    double best = 0.0;
    for (int x = -m.k; x <= m.k; ++x) best = std::max(best, pmf(m, x));
    CHECK(got >= static_cast<double>(symbols.size()) * -std::log2(best));
}

TEST_CASE("frequency table: sums to 2^16 with every symbol encodable") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 60; ++trial) {
        const int k = k_of(2 + static_cast<int>(rng() % 9));
        const double mu = std::uniform_real_distribution<double>(-double(k - 1), double(k - 1))(rng);
        const double sigma = std::pow(10.0, std::uniform_real_distribution<double>(-1.5, 3.0)(rng));
        const int64_t L = 1 + static_cast<int64_t>(rng() % 12);
        const int64_t n = 2 * L + 2 + static_cast<int64_t>(rng() % 1000000);
        const BorderAwareModel m = model_of(mu, sigma, L, n, k);
        const FrequencyTable t = build_frequency_table(m);
        CHECK(t.freqs.size() == static_cast<size_t>(2 * k + 1));
        uint64_t total = 0;
        for (uint32_t f : t.freqs) {
            CHECK(f >= 1);
            total += f;
        }
        CHECK(total == 65536);
        CHECK(t.cumulative.front() == 0);
        CHECK(t.cumulative.back() == 65536);
        for (size_t i = 0; i < t.freqs.size(); ++i)
            CHECK(t.cumulative[i + 1] > t.cumulative[i]);
        CHECK(t == oracle_table(m));
    }
}

TEST_CASE("frequency table: near-uniform interior for a huge sigma") {
    // large border mass so the deficit repair lands on a border symbol and
    // leaves the interior untouched
    const BorderAwareModel m = model_of(0.0, 60000.0, 1, 10, 127);
    const FrequencyTable t = build_frequency_table(m);
    uint32_t lo = ~0u, hi = 0;
    for (int x = -126; x <= 126; ++x) {
        lo = std::min(lo, t.freq(x));
        hi = std::max(hi, t.freq(x));
    }
    CHECK(hi - lo <= 1);
    CHECK(t == oracle_table(m));
}

TEST_CASE("frequency table is deterministic") {
    const BorderAwareModel m = model_of(0.25, 7.5, 4, 12345, 511);
    CHECK(build_frequency_table(m) == build_frequency_table(m));
}

TEST_CASE("frequency table rejects oversized alphabets") {
    BorderAwareModel m;
    m.mu = 0.0;
    m.sigma = 1.0;
    m.n_layers = 1;
    m.n_params = 1000000;
    m.k = 40000;  // 2k+1 > 2^16
    CHECK_THROWS_AS(build_frequency_table(m), UnsupportedError);
}

TEST_CASE("estimated model beats shifted models on synthetic Gaussian streams") {
    for (uint64_t seed : {100, 200, 300}) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(5.0, 9.0);
        const int k = 127;
        std::vector<int32_t> symbols;
        for (int i = 0; i < 10000; ++i) {
            const double v = gauss(rng);
            symbols.push_back(static_cast<int32_t>(std::clamp(v, -127.0, 127.0)));
        }
        symbols.push_back(-k);
        symbols.push_back(k);
        const BorderAwareModel fit = estimate(symbols, 1, k);
        BorderAwareModel up = fit, down = fit;
        up.mu = round_to_f16(fit.mu + 1.0);
        down.mu = round_to_f16(fit.mu - 1.0);
        const double r = rate(fit, symbols);
        CHECK(r <= rate(up, symbols));
        CHECK(r <= rate(down, symbols));
    }
}
