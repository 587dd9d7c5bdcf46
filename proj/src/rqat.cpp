#include "inrc/rqat.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "inrc/common.hpp"
#include "inrc/metrics.hpp"

namespace inrc {

namespace {

uint64_t fnv1a(const std::vector<double>& values) {
    uint64_t h = 1469598103934665603ull;
    for (double v : values) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xFF;
            h *= 1099511628211ull;
        }
    }
    return h;
}

SirenNetwork fake_quantize_network(const SirenNetwork& shadow, int q) {
    SirenNetwork qnet = shadow;
    for (int l = 0; l < shadow.layer_count(); ++l) {
        qnet.weights[l] = fake_quantize_group(shadow.weights[l], q);
        qnet.biases[l] = fake_quantize_group(shadow.biases[l], q);
    }
    return qnet;
}

}  // namespace

double rqat_loss(const ImageBuffer& image, const std::vector<double>& pred_quantized,
                 const std::vector<double>& pred_full_precision, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("rqat_loss: lambda must be nonnegative");
    if (pred_quantized.size() != image.pixels.size() ||
        pred_full_precision.size() != pred_quantized.size())
        throw std::invalid_argument("rqat_loss: shape mismatch");
    double base = mse_loss(pred_quantized, image);
    if (lambda == 0.0) return base;
    double reg = 0.0;
    for (size_t i = 0; i < pred_quantized.size(); ++i) {
        const double r = pred_quantized[i] - pred_full_precision[i];
        reg += r * r;
    }
    return base + lambda * reg / static_cast<double>(pred_quantized.size());
}

RqatResult train_rqat(const ImageBuffer& image, const SirenNetwork& init, const RqatConfig& cfg) {
    image.validate();
    init.validate();
    k_of(cfg.q);  // range check
    if (cfg.iterations < 1) throw std::invalid_argument("train_rqat: iterations must be >= 1");
    if (cfg.lambda < 0.0) throw std::invalid_argument("train_rqat: lambda must be nonnegative");

    const CoordinateGrid grid = make_grid(image.width, image.height);
    const bool regularized = cfg.lambda > 0.0;
    std::vector<double> target_pred;
    uint64_t target_hash = 0;
    if (regularized) {
        target_pred = forward(init, grid);  // fixed for the whole run
        target_hash = fnv1a(target_pred);
    }

    SirenNetwork shadow = init;
    AdamState state = AdamState::zeros_like(shadow);
    GradientSet grads;
    RqatResult result;
    result.loss_trace.reserve(cfg.iterations);
    for (int it = 0; it < cfg.iterations; ++it) {
        const SirenNetwork quantized = fake_quantize_network(shadow, cfg.q);
        double loss;
        try {
            loss = loss_and_gradients(quantized, grid, image,
                                      regularized ? &target_pred : nullptr, cfg.lambda, grads);
        } catch (const NumericError& e) {
            throw TrainingError("rqat diverged at iteration " + std::to_string(it) + ": " + e.what());
        }
        if (!std::isfinite(loss))
            throw TrainingError("rqat diverged at iteration " + std::to_string(it));
        result.loss_trace.push_back(loss);
        adam_step(state, shadow, grads, cfg.lr);
    }
    if (regularized && fnv1a(target_pred) != target_hash)
        throw std::logic_error("rqat: fixed target predictions changed");

    result.qnet = quantize_network(shadow, cfg.q);
    const SirenNetwork decoded = dequantize_network(result.qnet, shadow.w0);
    const std::vector<double> final_pred = forward(decoded, grid);
    result.final_loss = regularized ? rqat_loss(image, final_pred, target_pred, cfg.lambda)
                                    : mse_loss(final_pred, image);
    result.final_psnr_quantized = psnr_from_predictions(final_pred, image);
    return result;
}

LambdaSelection select_lambda(const ImageBuffer& image, const SirenNetwork& init,
                              const std::vector<double>& lambda_grid, const RqatConfig& base_cfg) {
    if (lambda_grid.empty()) throw std::invalid_argument("select_lambda: empty grid");
    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    LambdaSelection sel;
    bool have_best = false;
    for (double lambda : grid) {
        RqatConfig cfg = base_cfg;
        cfg.lambda = lambda;
        RqatResult result = train_rqat(image, init, cfg);
        sel.trials.push_back({lambda, result.final_psnr_quantized, result.final_loss});
        // strict > keeps the smaller lambda on ties (grid is ascending)
        if (!have_best || result.final_psnr_quantized > sel.best.final_psnr_quantized) {
            sel.best_lambda = lambda;
            sel.best = std::move(result);
            have_best = true;
        }
    }
    return sel;
}

}  // namespace inrc
