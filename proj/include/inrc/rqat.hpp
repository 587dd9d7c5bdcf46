#pragma once

#include <cstdint>
#include <vector>

#include "inrc/quantizer.hpp"
#include "inrc/siren.hpp"

namespace inrc {

struct RqatConfig {
    double lambda = 0.0;
    int q = 8;
    int iterations = 1;
    double lr = 2e-4;
    uint64_t seed = 0;
};

inline const std::vector<double> kDefaultLambdaGrid = {0.005, 0.05, 0.01, 0.1};

struct RqatResult {
    QuantizedNetwork qnet;
    double final_loss = 0.0;
    double final_psnr_quantized = 0.0;  // dB
    std::vector<double> loss_trace;     // one entry per iteration
};

// Distortion plus distillation:
//   mse(pred_quantized, image) + lambda * mse(pred_quantized, pred_full_precision)
double rqat_loss(const ImageBuffer& image, const std::vector<double>& pred_quantized,
                 const std::vector<double>& pred_full_precision, double lambda);

// Quantization-aware training with shadow full-precision parameters.
// Every step re-quantizes all groups (scales recomputed and treated as
// constants), evaluates the quantized network, and applies straight-through
// gradients to the shadow parameters with Adam. The regularizer compares
// against `init`'s predictions, computed once and held fixed. With
// lambda = 0 the regularizer path is skipped entirely. The returned qnet
// is the quantization of the final shadow parameters, and the reported
// final loss/PSNR are evaluated from exactly that network.
RqatResult train_rqat(const ImageBuffer& image, const SirenNetwork& init, const RqatConfig& cfg);

struct LambdaTrial {
    double lambda = 0.0;
    double psnr_quantized = 0.0;
    double final_loss = 0.0;
};

struct LambdaSelection {
    double best_lambda = 0.0;
    RqatResult best;
    std::vector<LambdaTrial> trials;  // ascending lambda, duplicates removed
};

// Runs train_rqat once per distinct grid value and keeps the result with
// the highest quantized PSNR; ties go to the smaller lambda.
LambdaSelection select_lambda(const ImageBuffer& image, const SirenNetwork& init,
                              const std::vector<double>& lambda_grid, const RqatConfig& base_cfg);

}  // namespace inrc
