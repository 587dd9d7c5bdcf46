#include "inrc/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace inrc::reference {

namespace {

// Evaluates one pixel, keeping every layer's input and pre-activation.
void eval_pixel(const SirenNetwork& net, double x, double y,
                std::vector<std::vector<double>>& inputs,
                std::vector<std::vector<double>>& zs) {
    const int layers = net.layer_count();
    inputs[0] = {x, y};
    for (int l = 0; l < layers; ++l) {
        const int in = net.layer_dims[l];
        const int out = net.layer_dims[l + 1];
        zs[l].assign(out, 0.0);
        for (int o = 0; o < out; ++o) {
            double s = net.biases[l][o];
            for (int i = 0; i < in; ++i) s += net.weights[l][o * in + i] * inputs[l][i];
            zs[l][o] = s;
        }
        if (l + 1 < layers) {
            inputs[l + 1].assign(out, 0.0);
            for (int o = 0; o < out; ++o) inputs[l + 1][o] = std::sin(net.w0 * zs[l][o]);
        }
    }
}

}  // namespace

std::vector<double> forward(const SirenNetwork& net, const CoordinateGrid& grid) {
    net.validate();
    const int layers = net.layer_count();
    std::vector<std::vector<double>> inputs(layers + 1), zs(layers);
    std::vector<double> out;
    out.reserve(static_cast<size_t>(grid.pixel_count()) * 3);
    for (int p = 0; p < grid.pixel_count(); ++p) {
        eval_pixel(net, grid.coords[2 * p], grid.coords[2 * p + 1], inputs, zs);
        for (int c = 0; c < 3; ++c) out.push_back(zs[layers - 1][c]);
    }
    return out;
}

double mse_loss(const std::vector<double>& predictions, const ImageBuffer& image) {
    if (predictions.size() != image.pixels.size())
        throw std::invalid_argument("reference mse: shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        const double r = predictions[i] - image.pixels[i];
        s += r * r;
    }
    return s / static_cast<double>(predictions.size());
}

double loss_and_gradients(const SirenNetwork& net, const CoordinateGrid& grid,
                          const ImageBuffer& image,
                          const std::vector<double>* extra_target, double lambda,
                          GradientSet& out) {
    net.validate();
    const int layers = net.layer_count();
    const int n_pixels = grid.pixel_count();
    const double inv = 1.0 / (static_cast<double>(n_pixels) * 3.0);

    out.d_weights.resize(layers);
    out.d_biases.resize(layers);
    for (int l = 0; l < layers; ++l) {
        out.d_weights[l].assign(net.weights[l].size(), 0.0);
        out.d_biases[l].assign(net.biases[l].size(), 0.0);
    }

    std::vector<std::vector<double>> inputs(layers + 1), zs(layers);
    std::vector<double> d_cur, d_prev;
    double loss = 0.0;
    for (int p = 0; p < n_pixels; ++p) {
        eval_pixel(net, grid.coords[2 * p], grid.coords[2 * p + 1], inputs, zs);
        d_cur.assign(3, 0.0);
        for (int c = 0; c < 3; ++c) {
            const double pred = zs[layers - 1][c];
            const double r1 = pred - image.pixels[3 * p + c];
            loss += r1 * r1;
            double g = 2.0 * r1;
            if (extra_target) {
                const double r2 = pred - (*extra_target)[3 * p + c];
                loss += lambda * r2 * r2;
                g += 2.0 * lambda * r2;
            }
            d_cur[c] = g * inv;
        }
        for (int l = layers - 1; l >= 0; --l) {
            const int in = net.layer_dims[l];
            const int out_d = net.layer_dims[l + 1];
            if (l + 1 < layers)
                for (int o = 0; o < out_d; ++o) d_cur[o] *= net.w0 * std::cos(net.w0 * zs[l][o]);
            for (int o = 0; o < out_d; ++o) {
                out.d_biases[l][o] += d_cur[o];
                for (int i = 0; i < in; ++i)
                    out.d_weights[l][o * in + i] += d_cur[o] * inputs[l][i];
            }
            if (l > 0) {
                d_prev.assign(in, 0.0);
                for (int o = 0; o < out_d; ++o)
                    for (int i = 0; i < in; ++i) d_prev[i] += d_cur[o] * net.weights[l][o * in + i];
                d_cur = d_prev;
            }
        }
    }
    return loss * inv;
}

}  // namespace inrc::reference
