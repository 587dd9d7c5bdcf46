// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Heavier training-based criteria share their fitted
// networks, so the suite runs end to end in a few minutes on two cores.

#include <omp.h>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "inrc/bitstream.hpp"
#include "inrc/entropy_model.hpp"
#include "inrc/float16.hpp"
#include "inrc/image_io.hpp"
#include "inrc/metrics.hpp"
#include "inrc/quantizer.hpp"
#include "inrc/range_coder.hpp"
#include "inrc/rqat.hpp"
#include "inrc/siren.hpp"

using namespace inrc;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, double seconds) {
    std::printf("[%2d] %s  %s  (%.1f s)\n", id, pass ? "PASS" : "FAIL", what.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* pattern, ...) {
    char buffer[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buffer, sizeof(buffer), pattern, args);
    va_end(args);
    return buffer;
}

// ---- criterion 1: gradient correctness ------------------------------------

void criterion_gradients() {
    const double t0 = omp_get_wtime();
    double worst = 0.0;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        const SirenNetwork net = init_siren({2, 8, 8, 3}, 30.0, seed);
        const CoordinateGrid grid = make_grid(6, 6);
        const ImageBuffer image = testutil::random_image(6, 6, seed + 50);
        worst = std::max(worst, testutil::max_fd_rel_error(net, grid, image));
    }
    report(1, worst < 1e-4,
           fmt("gradient correctness: max finite-difference rel err %.3e < 1e-4", worst),
           omp_get_wtime() - t0);
}

// ---- criterion 2: quantization bound ---------------------------------------

void criterion_quantization() {
    const double t0 = omp_get_wtime();
    std::mt19937_64 rng(2024);
    bool ok = true;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const int q = (trial % 2) ? 10 : 8;
        const int k = k_of(q);
        const size_t n = 1 + rng() % 10000;
        const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-3, 3)(rng));
        std::vector<double> values(n);
        for (double& v : values) v = std::uniform_real_distribution<double>(-scale, scale)(rng);
        values[rng() % n] = (rng() % 2) ? scale : -scale;  // known group maximum

        const QuantizedGroup group = quantize_group(values, q);
        const std::vector<double> rec = dequantize_group(group.symbols, group.absmax, q);
        const double ulp =
            group.absmax > 0.0 ? std::ldexp(1.0, std::ilogb(group.absmax) - 52) : 0.0;
        const double bound = group.absmax / (2.0 * k) + 4.0 * ulp;
        int32_t peak = 0;
        for (size_t i = 0; i < n; ++i) {
            const double err = std::fabs(values[i] - rec[i]);
            if (err > bound) ok = false;
            if (bound > 0.0) worst_ratio = std::max(worst_ratio, err / bound);
            peak = std::max(peak, std::abs(group.symbols[i]));
        }
        if (group.absmax > 0.0 && peak != k) ok = false;
    }
    report(2, ok,
           fmt("quantization: 1000 random groups within absmax/(2k)+4ulp "
               "(worst err/bound %.3f), full-scale symbol present",
               worst_ratio),
           omp_get_wtime() - t0);
}

// ---- criterion 3: entropy model validity -----------------------------------

void criterion_entropy_model() {
    const double t0 = omp_get_wtime();
    std::mt19937_64 rng(3);
    bool ok = true;
    double worst_gap = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int q = kMinBits + static_cast<int>(rng() % (kMaxBits - kMinBits + 1));
        const int k = k_of(q);
        BorderAwareModel m;
        m.k = k;
        m.n_layers = 1 + static_cast<int64_t>(rng() % 10);
        m.n_params = 2 * m.n_layers + 1 + static_cast<int64_t>(rng() % 1000000);
        m.mu = round_to_f16(std::uniform_real_distribution<double>(-(k - 1.0), k - 1.0)(rng));
        m.sigma = std::max(
            round_to_f16(std::pow(10.0, std::uniform_real_distribution<double>(-1, 3)(rng))),
            sigma_floor());
        m.validate();

        double sum = 0.0, c = 0.0;  // compensated measurement of the mass
        for (int x = -k; x <= k; ++x) {
            const double y = pmf(m, x) - c;
            const double t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        worst_gap = std::max(worst_gap, std::fabs(sum - 1.0));
        if (std::fabs(sum - 1.0) > 1e-12) ok = false;
        const double border = static_cast<double>(m.n_layers) / static_cast<double>(m.n_params);
        if (pmf(m, k) != border || pmf(m, -k) != border) ok = false;
    }
    report(3, ok,
           fmt("entropy model: 100 configs, |sum pmf - 1| max %.2e <= 1e-12, "
               "borders equal L/n exactly",
               worst_gap),
           omp_get_wtime() - t0);
}

// ---- criterion 4: coder losslessness and efficiency ------------------------

void criterion_coder() {
    const double t0 = omp_get_wtime();
    bool lossless = true, efficient = true;
    double worst_overhead = 0.0;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed * 977);
        BorderAwareModel m;
        m.k = (seed % 2) ? 127 : 511;
        m.n_layers = 1 + static_cast<int64_t>(rng() % 6);
        m.n_params = 100000;
        m.mu = round_to_f16(std::uniform_real_distribution<double>(-10.0, 10.0)(rng));
        m.sigma = std::max(
            round_to_f16(std::pow(10.0, std::uniform_real_distribution<double>(-0.5, 1.8)(rng))),
            sigma_floor());
        const FrequencyTable table = build_frequency_table(m);

        std::vector<int32_t> symbols(100000);
        for (int32_t& s : symbols) {
            const uint32_t slot = static_cast<uint32_t>(rng() % kTableTotal);
            const auto it = std::upper_bound(table.cumulative.begin(), table.cumulative.end(), slot);
            s = table.min_symbol + static_cast<int32_t>(it - table.cumulative.begin()) - 1;
        }
        const CodedPayload payload = rans_encode(symbols, table);
        if (rans_decode(payload, table, static_cast<int64_t>(symbols.size())) != symbols)
            lossless = false;

        double cross_entropy = 0.0;
        for (int32_t s : symbols)
            cross_entropy += -std::log2(table.freq(s) / static_cast<double>(kTableTotal));
        const double bits = 8.0 * static_cast<double>(payload.bytes.size());
        if (bits > cross_entropy * 1.001 + 64.0) efficient = false;
        worst_overhead = std::max(worst_overhead, bits - cross_entropy);
    }
    report(4, lossless && efficient,
           fmt("coder: 20 x 1e5 symbols lossless, length within cross-entropy + 64 bit + 0.1%% "
               "(worst overhead %.1f bits)",
               worst_overhead),
           omp_get_wtime() - t0);
}

// ---- criterion 5: bitstream round trip -------------------------------------

void criterion_bitstream() {
    const double t0 = omp_get_wtime();
    std::mt19937_64 rng(5);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        const int q = (trial % 2) ? 8 : 10;
        const std::vector<int> dims = {2, 2 + static_cast<int>(rng() % 24),
                                       2 + static_cast<int>(rng() % 24), 3};
        const SirenNetwork net = init_siren(dims, 30.0, rng());
        const QuantizedNetwork qnet = quantize_network(net, q);
        const int w = 1 + static_cast<int>(rng() % 128);
        const int h = 1 + static_cast<int>(rng() % 128);
        const std::vector<uint8_t> bytes = serialize(qnet, w, h);
        const DecodedStream decoded = deserialize(bytes);

        if (decoded.qnet.weight_symbols != qnet.weight_symbols ||
            decoded.qnet.bias_symbols != qnet.bias_symbols ||
            decoded.qnet.weight_absmax != qnet.weight_absmax ||
            decoded.qnet.bias_absmax != qnet.bias_absmax || decoded.width != w ||
            decoded.height != h)
            ok = false;

        const StreamHeader header = read_header(bytes);
        BorderAwareModel decoder_model;
        decoder_model.mu = header.mu;
        decoder_model.sigma = header.sigma;
        decoder_model.n_layers = header.layer_count();
        decoder_model.n_params = header.symbol_count();
        decoder_model.k = k_of(header.q);
        if (!(build_frequency_table(decoder_model) == entropy_plan(qnet).table)) ok = false;
        if (header.side_info_bits() != 2 * header.layer_count() * 16 + 32) ok = false;

        // absmax fields occupy exactly 2L binary16 slots, the model two more
        const size_t expected_header = 4 + 1 + 1 + 2 + 2 + 1 + 2 * dims.size() +
                                       2 * 2 * (dims.size() - 1) + 2 + 2 + 4;
        if (header.header_bytes != expected_header) ok = false;
    }
    report(5, ok,
           "bitstream: 100 round trips symbol/scale exact, decoder tables match, "
           "side info = 2L*16 + 32 bits",
           omp_get_wtime() - t0);
}

// ---- criterion 6: end-to-end consistency and golden stream -----------------

void criterion_end_to_end() {
    const double t0 = omp_get_wtime();
    const ImageBuffer image = testutil::load_crop("crop16.ppm");
    FitConfig fit_cfg;
    fit_cfg.layer_dims = {2, 16, 16, 3};
    fit_cfg.iterations = 600;
    fit_cfg.seed = 11;
    const SirenNetwork star = fit_full_precision(image, fit_cfg);
    RqatConfig cfg;
    cfg.lambda = 0.0;
    cfg.q = 8;
    cfg.iterations = 200;
    const RqatResult trained = train_rqat(image, star, cfg);

    const std::vector<uint8_t> stream = serialize(trained.qnet, image.width, image.height);
    const ImageBuffer decoded = decode_image(stream, 30.0);

    const std::vector<double> encoder_pred =
        forward(dequantize_network(trained.qnet, 30.0), make_grid(image.width, image.height));
    bool exact = decoded.pixels.size() == encoder_pred.size();
    for (size_t i = 0; exact && i < encoder_pred.size(); ++i)
        if (decoded.pixels[i] != std::clamp(encoder_pred[i], 0.0, 1.0)) exact = false;

    // committed golden stream still decodes to the committed image
    bool golden_ok = true;
    {
        std::ifstream in(testutil::data_path("golden_16x16.rqat"), std::ios::binary);
        const std::vector<uint8_t> golden((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
        const ImageBuffer gdec = decode_image(golden, 30.0);
        const ImageBuffer gref = load_image(testutil::data_path("golden_16x16.ppm"));
        if (golden.empty() || gdec.width != gref.width || gdec.height != gref.height)
            golden_ok = false;
        for (size_t i = 0; golden_ok && i < gref.pixels.size(); ++i) {
            const double v = std::lround(std::clamp(gdec.pixels[i], 0.0, 1.0) * 255.0) / 255.0;
            if (v != gref.pixels[i]) golden_ok = false;
        }
    }
    report(6, exact && golden_ok,
           "end-to-end: decode(encode) equals encoder-side prediction bit-exactly; "
           "golden stream unchanged",
           omp_get_wtime() - t0);
}

// ---- criterion 9: delta-rate tool ------------------------------------------

void criterion_bd_rate() {
    const double t0 = omp_get_wtime();
    std::vector<RDPoint> a = {{0.12, 27.3, ""}, {0.25, 30.1, ""}, {0.48, 33.4, ""}, {0.95, 36.2, ""}};
    std::vector<RDPoint> doubled = a;
    for (RDPoint& p : doubled) p.bpp *= 2.0;

    const double self = bd_rate(a, a);
    const double twice = bd_rate(a, doubled);

    // oracle: trapezoid integration over independently fitted cubics
    std::vector<RDPoint> b = {{0.10, 27.9, ""}, {0.22, 30.8, ""}, {0.45, 33.9, ""}, {0.90, 36.8, ""}};
    auto fit_log = [](const std::vector<RDPoint>& pts, double center) {
        double sx[7] = {0}, sy[4] = {0};
        for (const auto& p : pts) {
            double t = 1.0;
            const double x = p.psnr - center;
            for (int i = 0; i < 7; ++i, t *= x) sx[i] += t;
            t = 1.0;
            for (int i = 0; i < 4; ++i, t *= x) sy[i] += t * std::log10(p.bpp);
        }
        double m[4][5];
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) m[r][c] = sx[r + c];
            m[r][4] = sy[r];
        }
        for (int col = 0; col < 4; ++col) {
            int piv = col;
            for (int r = col + 1; r < 4; ++r)
                if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
            for (int c = 0; c < 5; ++c) std::swap(m[piv][c], m[col][c]);
            for (int r = 0; r < 4; ++r) {
                if (r == col) continue;
                const double f = m[r][col] / m[col][col];
                for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
            }
        }
        return std::array<double, 4>{m[0][4] / m[0][0], m[1][4] / m[1][1], m[2][4] / m[2][2],
                                     m[3][4] / m[3][3]};
    };
    const double lo = std::max(a.front().psnr, b.front().psnr);
    const double hi = std::min(a.back().psnr, b.back().psnr);
    const double ca_center = (27.3 + 30.1 + 33.4 + 36.2) / 4.0;
    const double cb_center = (27.9 + 30.8 + 33.9 + 36.8) / 4.0;
    const auto ca = fit_log(a, ca_center);
    const auto cb = fit_log(b, cb_center);
    auto eval = [](const std::array<double, 4>& c, double t) {
        return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
    };
    double ia = 0, ib = 0;
    const int panels = 400000;
    for (int i = 0; i < panels; ++i) {
        const double x0 = lo + (hi - lo) * i / panels;
        const double x1 = lo + (hi - lo) * (i + 1) / panels;
        ia += 0.5 * (eval(ca, x0 - ca_center) + eval(ca, x1 - ca_center)) * (x1 - x0);
        ib += 0.5 * (eval(cb, x0 - cb_center) + eval(cb, x1 - cb_center)) * (x1 - x0);
    }
    const double oracle = (std::pow(10.0, (ib - ia) / (hi - lo)) - 1.0) * 100.0;
    const double got = bd_rate(a, b);

    const bool ok = std::fabs(self) < 1e-9 && std::fabs(twice - 100.0) < 1e-6 &&
                    std::fabs(got - oracle) < 0.01;
    report(9, ok,
           fmt("bd-rate: identical %.1e%%, doubled %+.6f%%, 4-point case %.4f%% vs oracle %.4f%%",
               self, twice, got, oracle),
           omp_get_wtime() - t0);
}

// ---- criteria 7, 8, 10: training-quality gates (shared fits) ----------------

struct SeedArtifacts {
    SirenNetwork star;
    double psnr_fp = 0.0;
    double psnr_ptq = 0.0;    // naive post-training quantization, q = 8
    double psnr_rqat0 = 0.0;  // RQAT lambda = 0, q = 8
    RqatResult rqat0;
};

SeedArtifacts train_seed(const ImageBuffer& image, uint64_t seed) {
    SeedArtifacts art;
    FitConfig cfg;
    cfg.layer_dims = {2, 32, 32, 32, 32, 32, 3};
    cfg.w0 = 30.0;
    cfg.lr = 2e-4;
    cfg.iterations = 5000;
    cfg.seed = seed;
    art.star = fit_full_precision(image, cfg);
    const CoordinateGrid grid = make_grid(image.width, image.height);
    art.psnr_fp = psnr_from_predictions(forward(art.star, grid), image);

    const QuantizedNetwork ptq = quantize_network(art.star, 8);
    art.psnr_ptq = psnr_from_predictions(forward(dequantize_network(ptq, 30.0), grid), image);

    RqatConfig rq;
    rq.lambda = 0.0;
    rq.q = 8;
    rq.iterations = 2000;
    rq.lr = 2e-4;
    rq.seed = seed;
    art.rqat0 = train_rqat(image, art.star, rq);
    art.psnr_rqat0 = art.rqat0.final_psnr_quantized;
    return art;
}

void criteria_training(const ImageBuffer& crop32) {
    // criterion 7: overfitting capability
    double t0 = omp_get_wtime();
    const SeedArtifacts seed0 = train_seed(crop32, 0);
    report(7, seed0.psnr_fp >= 30.0,
           fmt("overfitting: 5000-step full-precision fit reaches %.2f dB >= 30 dB", seed0.psnr_fp),
           omp_get_wtime() - t0);

    // criterion 8: quantization recovery over 3 seeds
    t0 = omp_get_wtime();
    std::vector<SeedArtifacts> seeds;
    seeds.push_back(seed0);
    seeds.push_back(train_seed(crop32, 1));
    seeds.push_back(train_seed(crop32, 2));

    double mean_gain_over_ptq = 0.0, mean_best_minus_plain = 0.0, mean_best_lambda = 0.0;
    RqatConfig rq;
    rq.q = 8;
    rq.iterations = 2000;
    rq.lr = 2e-4;
    for (const SeedArtifacts& art : seeds) {
        const LambdaSelection sel = select_lambda(crop32, art.star, kDefaultLambdaGrid, rq);
        mean_gain_over_ptq += art.psnr_rqat0 - art.psnr_ptq;
        mean_best_minus_plain += sel.best.final_psnr_quantized - art.psnr_rqat0;
        mean_best_lambda += sel.best_lambda;
    }
    mean_gain_over_ptq /= static_cast<double>(seeds.size());
    mean_best_minus_plain /= static_cast<double>(seeds.size());
    mean_best_lambda /= static_cast<double>(seeds.size());
    const bool pass_a = mean_gain_over_ptq >= 0.5;
    const bool pass_b = mean_best_minus_plain >= -0.05;
    report(8, pass_a && pass_b,
           fmt("qat benefit (3 seeds): plain-qat over naive quantization %+.2f dB (need >= +0.5); "
               "regularized best-of-grid delta %+.3f dB (need >= -0.05, mean best lambda %.3g)",
               mean_gain_over_ptq, mean_best_minus_plain, mean_best_lambda),
           omp_get_wtime() - t0);

    // criterion 10: bit-depth ordering on the seed-0 artifacts
    t0 = omp_get_wtime();
    RqatConfig rq10 = rq;
    rq10.q = 10;
    rq10.lambda = 0.0;
    const RqatResult q10 = train_rqat(crop32, seed0.star, rq10);

    const EntropyPlan plan8 = entropy_plan(seed0.rqat0.qnet);
    const EntropyPlan plan10 = entropy_plan(q10.qnet);
    const double rate8 = rate(plan8.model, plan8.symbols);
    const double rate10 = rate(plan10.model, plan10.symbols);
    const bool ordered = q10.final_psnr_quantized >= seed0.psnr_rqat0 && rate10 > rate8;
    report(10, ordered,
           fmt("bit depth: q=10 %.2f dB >= q=8 %.2f dB; rate %.0f bits > %.0f bits",
               q10.final_psnr_quantized, seed0.psnr_rqat0, rate10, rate8),
           omp_get_wtime() - t0);
}

}  // namespace

int main() {
    std::printf("acceptance suite (threads: %d)\n", omp_get_max_threads());
    const double t0 = omp_get_wtime();

    criterion_gradients();
    criterion_quantization();
    criterion_entropy_model();
    criterion_coder();
    criterion_bitstream();
    criterion_end_to_end();
    criterion_bd_rate();

    const ImageBuffer crop32 = testutil::load_crop("crop32.ppm");
    criteria_training(crop32);

    std::printf("total: %.1f s, %d criteria failed\n", omp_get_wtime() - t0, failures);
    return failures == 0 ? 0 : 1;
}
