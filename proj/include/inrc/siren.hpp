#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "inrc/image.hpp"

namespace inrc {

// Sinusoidal MLP mapping (x, y) to RGB. Hidden layers compute
// sin(w0 * (W h + b)); the final layer is affine with no activation.
// Weight matrices are row-major, shape out x in.
struct SirenNetwork {
    std::vector<int> layer_dims;               // first = 2, last = 3
    std::vector<std::vector<double>> weights;  // one out*in block per layer
    std::vector<std::vector<double>> biases;   // one out block per layer
    double w0 = 30.0;

    int layer_count() const { return static_cast<int>(weights.size()); }
    int64_t parameter_count() const;
    void validate() const;
};

// Seeded sine-network initialization: every weight matrix is drawn
// uniformly from [-sqrt(6/fan_in)/w0, sqrt(6/fan_in)/w0], biases start at
// zero. The draw order is fixed (layer by layer, row-major), and the
// uniform variate is built directly from mt19937_64 output so results do
// not depend on the standard library's distribution implementation.
SirenNetwork init_siren(const std::vector<int>& layer_dims, double w0, uint64_t seed);

// Batch evaluation over a grid. Returns width*height*3 unclamped values in
// the grid's pixel order. Internally parallel over fixed pixel blocks;
// outputs are per-pixel independent, so the result is bit-identical to a
// sequential evaluation regardless of thread count.
std::vector<double> forward(const SirenNetwork& net, const CoordinateGrid& grid);

// Mean over all W*H*3 channel values of the squared error. Accumulated over
// fixed pixel blocks in a fixed order, so the value does not depend on the
// number of threads.
double mse_loss(const std::vector<double>& predictions, const ImageBuffer& image);

// Per-parameter gradients, same shapes as the network's weights/biases.
struct GradientSet {
    std::vector<std::vector<double>> d_weights;
    std::vector<std::vector<double>> d_biases;
};

// Reverse-mode gradients of
//   mse(pred, image) + lambda * mse(pred, *extra_target)
// with respect to every weight and bias. Deterministic for any thread
// count (fixed block accumulation order). A non-finite intermediate
// raises NumericError naming the layer.
GradientSet gradients(const SirenNetwork& net, const CoordinateGrid& grid,
                      const ImageBuffer& image,
                      const std::vector<double>* extra_target = nullptr,
                      double lambda = 0.0);

// Fused evaluation used by the training loops: one pass produces the loss
// and its gradients without materializing predictions globally.
double loss_and_gradients(const SirenNetwork& net, const CoordinateGrid& grid,
                          const ImageBuffer& image,
                          const std::vector<double>* extra_target, double lambda,
                          GradientSet& out);

// Adam optimizer state (first/second moments per parameter, step counter).
struct AdamState {
    std::vector<std::vector<double>> m_weights, v_weights;
    std::vector<std::vector<double>> m_biases, v_biases;
    int64_t step = 0;

    static AdamState zeros_like(const SirenNetwork& net);
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

// One bias-corrected Adam update, applied in place to the network.
// Throws NumericError on a non-finite gradient.
void adam_step(AdamState& state, SirenNetwork& net, const GradientSet& grads, double lr);

struct FitConfig {
    std::vector<int> layer_dims;
    double w0 = 30.0;
    double lr = 2e-4;
    int iterations = 1;
    uint64_t seed = 0;
};

// Full-batch overfit of the network to the image. Deterministic given the
// seed. Throws TrainingError (with the iteration index) if the loss turns
// non-finite. When loss_trace is given, it receives one entry per step.
SirenNetwork fit_full_precision(const ImageBuffer& image, const FitConfig& config,
                                std::vector<double>* loss_trace = nullptr);

}  // namespace inrc
