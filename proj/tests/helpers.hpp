#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "inrc/image.hpp"
#include "inrc/image_io.hpp"
#include "inrc/reference.hpp"
#include "inrc/siren.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
    return std::string(INRC_TEST_DATA_DIR) + "/" + name;
}

inline inrc::ImageBuffer load_crop(const std::string& name) {
    return inrc::load_image(data_path(name));
}

inline inrc::ImageBuffer random_image(int w, int h, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    inrc::ImageBuffer image;
    image.width = w;
    image.height = h;
    image.pixels.resize(static_cast<size_t>(w) * h * 3);
    for (double& v : image.pixels) v = dist(rng);
    return image;
}

inline inrc::ImageBuffer constant_image(int w, int h, double r, double g, double b) {
    inrc::ImageBuffer image;
    image.width = w;
    image.height = h;
    for (int p = 0; p < w * h; ++p) {
        image.pixels.push_back(r);
        image.pixels.push_back(g);
        image.pixels.push_back(b);
    }
    return image;
}

// Independent loss path for finite differencing: reference kernels only.
inline double reference_loss(const inrc::SirenNetwork& net, const inrc::CoordinateGrid& grid,
                             const inrc::ImageBuffer& image,
                             const std::vector<double>* extra, double lambda) {
    const std::vector<double> pred = inrc::reference::forward(net, grid);
    double loss = inrc::reference::mse_loss(pred, image);
    if (extra) {
        double reg = 0.0;
        for (size_t i = 0; i < pred.size(); ++i) {
            const double r = pred[i] - (*extra)[i];
            reg += r * r;
        }
        loss += lambda * reg / static_cast<double>(pred.size());
    }
    return loss;
}

// Max relative error between reverse-mode gradients and central finite
// differences (h = 1e-6) over every parameter.
inline double max_fd_rel_error(const inrc::SirenNetwork& net, const inrc::CoordinateGrid& grid,
                               const inrc::ImageBuffer& image,
                               const std::vector<double>* extra = nullptr, double lambda = 0.0) {
    const inrc::GradientSet grads = inrc::gradients(net, grid, image, extra, lambda);
    const double h = 1e-6;
    double worst = 0.0;
    inrc::SirenNetwork probe = net;
    auto check = [&](std::vector<double>& params, const std::vector<double>& g) {
        for (size_t i = 0; i < params.size(); ++i) {
            const double keep = params[i];
            params[i] = keep + h;
            const double hi = reference_loss(probe, grid, image, extra, lambda);
            params[i] = keep - h;
            const double lo = reference_loss(probe, grid, image, extra, lambda);
            params[i] = keep;
            const double fd = (hi - lo) / (2.0 * h);
            const double rel = std::fabs(g[i] - fd) / std::max({std::fabs(fd), std::fabs(g[i]), 1e-8});
            worst = std::max(worst, rel);
        }
    };
    for (int l = 0; l < probe.layer_count(); ++l) {
        check(probe.weights[l], grads.d_weights[l]);
        check(probe.biases[l], grads.d_biases[l]);
    }
    return worst;
}

inline bool same_params(const inrc::SirenNetwork& a, const inrc::SirenNetwork& b) {
    if (a.layer_dims != b.layer_dims) return false;
    for (int l = 0; l < a.layer_count(); ++l)
        if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
    return true;
}

}  // namespace testutil
