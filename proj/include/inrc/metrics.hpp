#pragma once

#include <string>
#include <vector>

#include "inrc/image.hpp"

namespace inrc {

// 10 * log10(1 / mse) over all W*H*3 channel values, both images clamped
// to [0, 1] first. Identical images return +infinity.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

// Same metric for raw (unclamped) network predictions against an image.
double psnr_from_predictions(const std::vector<double>& predictions, const ImageBuffer& image);

// 8 * byte_count / pixel count.
double bpp(size_t byte_count, int width, int height);

struct RDPoint {
    double bpp = 0.0;
    double psnr = 0.0;
    std::string label;
};

// Bjontegaard delta-rate in percent: cubic fit of log10(rate) against
// PSNR per curve, integrated over the common PSNR interval. Positive
// means `test` spends more rate than `anchor` at equal quality. Requires
// >= 4 points per curve, distinct PSNR values, and overlapping ranges.
double bd_rate(std::vector<RDPoint> anchor, std::vector<RDPoint> test);

// Dense multiply-adds per pixel in thousands; bias adds and activations
// are not counted.
double mac_per_pixel(const std::vector<int>& layer_dims);

}  // namespace inrc
