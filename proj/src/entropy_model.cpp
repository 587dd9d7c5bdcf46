#include "inrc/entropy_model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "inrc/common.hpp"
#include "inrc/float16.hpp"

namespace inrc {

double sigma_floor() {
    static const double floor_value = round_up_to_f16(0.1);
    return floor_value;
}

void BorderAwareModel::validate() const {
    if (k < 1) throw std::invalid_argument("model: k must be positive");
    if (n_layers < 1) throw std::invalid_argument("model: need at least one layer");
    if (2 * n_layers >= n_params) throw std::invalid_argument("model: border mass must be < 1");
    if (!(sigma >= sigma_floor())) throw std::invalid_argument("model: sigma below floor");
    if (!(std::fabs(mu) <= static_cast<double>(k - 1)))
        throw std::invalid_argument("model: mu outside the interior support");
    if (double_from_f16(f16_from_double(mu)) != mu ||
        double_from_f16(f16_from_double(sigma)) != sigma)
        throw std::invalid_argument("model: parameters must be binary16 values");
}

namespace {

// Interior weights share one normalizer; computing it once keeps rate and
// table construction O(k + n) instead of O(k * n).
struct PmfEvaluator {
    double mu, sigma, border, coeff, denom;
    int k;

    explicit PmfEvaluator(const BorderAwareModel& m)
        : mu(m.mu), sigma(m.sigma), k(m.k) {
        border = static_cast<double>(m.n_layers) / static_cast<double>(m.n_params);
        coeff = 1.0 - 2.0 * border;
        // Fixed left-to-right compensated sum over u = -(k-1) .. (k-1).
        double sum = 0.0, c = 0.0;
        for (int u = -(k - 1); u <= k - 1; ++u) {
            const double y = weight(u) - c;
            const double t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        denom = sum;
    }

    double weight(int x) const {
        const double t = (static_cast<double>(x) - mu) / sigma;
        return std::exp(-0.5 * t * t);
    }

    double operator()(int x) const {
        if (x == k || x == -k) return border;
        if (x > -k && x < k) return coeff * weight(x) / denom;
        return 0.0;
    }
};

}  // namespace

BorderAwareModel estimate(std::span<const int32_t> symbols, int64_t n_layers, int k) {
    if (symbols.empty()) throw std::invalid_argument("estimate: empty symbol array");
    if (n_layers < 1) throw std::invalid_argument("estimate: need at least one layer");
    if (k < 1) throw std::invalid_argument("estimate: k must be positive");
    // Integer moment sums are exact in 64 bits for any realistic stream.
    int64_t count = 0, sum = 0;
    uint64_t sum_sq = 0;
    for (int32_t s : symbols) {
        if (s < -k || s > k) throw std::invalid_argument("estimate: symbol out of range");
        if (s > -k && s < k) {
            ++count;
            sum += s;
            sum_sq += static_cast<uint64_t>(static_cast<int64_t>(s) * s);
        }
    }
    BorderAwareModel model;
    model.n_layers = n_layers;
    model.n_params = static_cast<int64_t>(symbols.size());
    model.k = k;
    if (count > 0) {
        const double mean = static_cast<double>(sum) / static_cast<double>(count);
        const double ex2 = static_cast<double>(sum_sq) / static_cast<double>(count);
        const double var = std::max(0.0, ex2 - mean * mean);
        model.mu = round_to_f16(mean);
        model.sigma = std::max(round_to_f16(std::sqrt(var)), sigma_floor());
    } else {
        model.mu = 0.0;
        model.sigma = sigma_floor();
    }
    model.validate();
    return model;
}

double pmf(const BorderAwareModel& model, int x) {
    model.validate();
    // Point queries share the O(k) interior normalizer through a per-thread
    // memo of the last model seen.
    thread_local std::unique_ptr<std::pair<BorderAwareModel, PmfEvaluator>> memo;
    if (!memo || !(memo->first == model))
        memo = std::make_unique<std::pair<BorderAwareModel, PmfEvaluator>>(model,
                                                                           PmfEvaluator(model));
    return memo->second(x);
}

double rate(const BorderAwareModel& model, std::span<const int32_t> symbols) {
    model.validate();
    const PmfEvaluator eval(model);
    std::vector<int64_t> hist(static_cast<size_t>(2 * model.k + 1), 0);
    for (int32_t s : symbols) {
        if (s < -model.k || s > model.k)
            throw std::invalid_argument("rate: symbol outside [-k, k]");
        ++hist[static_cast<size_t>(s + model.k)];
    }
    double bits = 0.0;
    for (int x = -model.k; x <= model.k; ++x) {
        const int64_t n = hist[static_cast<size_t>(x + model.k)];
        if (n > 0) bits += static_cast<double>(n) * -std::log2(eval(x));
    }
    return bits;
}

FrequencyTable build_frequency_table(const BorderAwareModel& model) {
    model.validate();
    const int64_t size = 2 * static_cast<int64_t>(model.k) + 1;
    if (size > static_cast<int64_t>(kTableTotal))
        throw UnsupportedError("frequency table: alphabet larger than table precision");

    const PmfEvaluator eval(model);
    FrequencyTable table;
    table.precision_bits = static_cast<int>(kTablePrecisionBits);
    table.min_symbol = -model.k;
    table.freqs.resize(static_cast<size_t>(size));
    for (int64_t i = 0; i < size; ++i) {
        const double p = eval(static_cast<int>(i) - model.k);
        const double scaled = std::floor(p * static_cast<double>(kTableTotal));
        table.freqs[static_cast<size_t>(i)] =
            std::max<uint32_t>(1, static_cast<uint32_t>(scaled));
    }

    int64_t total = 0;
    for (uint32_t f : table.freqs) total += f;
    int64_t deficit = static_cast<int64_t>(kTableTotal) - total;
    if (deficit > 0) {
        // All surplus goes to the single largest frequency.
        size_t best = 0;
        for (size_t i = 1; i < table.freqs.size(); ++i)
            if (table.freqs[i] > table.freqs[best]) best = i;
        table.freqs[best] += static_cast<uint32_t>(deficit);
    } else if (deficit < 0) {
        // Remove from the largest frequencies first, never dropping below 1.
        std::vector<size_t> order(table.freqs.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return table.freqs[a] > table.freqs[b];
        });
        int64_t remaining = -deficit;
        for (size_t idx : order) {
            if (remaining == 0) break;
            const int64_t take = std::min<int64_t>(remaining, table.freqs[idx] - 1);
            table.freqs[idx] -= static_cast<uint32_t>(take);
            remaining -= take;
        }
        if (remaining != 0) throw UnsupportedError("frequency table: cannot settle deficit");
    }

    table.cumulative.resize(table.freqs.size() + 1);
    table.cumulative[0] = 0;
    for (size_t i = 0; i < table.freqs.size(); ++i)
        table.cumulative[i + 1] = table.cumulative[i] + table.freqs[i];
    return table;
}

}  // namespace inrc
