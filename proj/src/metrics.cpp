#include "inrc/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace inrc {

namespace {

double clamped_mse(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double r = std::clamp(a[i], 0.0, 1.0) - std::clamp(b[i], 0.0, 1.0);
        s += r * r;
    }
    return s / static_cast<double>(a.size());
}

double mse_to_db(double mse) {
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

// Least-squares cubic of y against centered x; returns {c, a0..a3}.
struct CubicFit {
    double center;
    std::array<double, 4> coeff;
};

CubicFit fit_cubic(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double center = 0.0;
    for (double v : x) center += v;
    center /= static_cast<double>(n);

    double moments[7] = {0};
    double rhs[4] = {0};
    for (size_t i = 0; i < n; ++i) {
        const double t = x[i] - center;
        double tp = 1.0;
        for (int p = 0; p <= 6; ++p, tp *= t) moments[p] += tp;
        tp = 1.0;
        for (int p = 0; p <= 3; ++p, tp *= t) rhs[p] += y[i] * tp;
    }
    double a[4][5];
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) a[r][c] = moments[r + c];
        a[r][4] = rhs[r];
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0) throw std::invalid_argument("bd_rate: degenerate curve fit");
        if (pivot != col)
            for (int c = 0; c < 5; ++c) std::swap(a[pivot][c], a[col][c]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
        }
    }
    CubicFit fit;
    fit.center = center;
    for (int r = 0; r < 4; ++r) fit.coeff[r] = a[r][4] / a[r][r];
    return fit;
}

double integrate(const CubicFit& fit, double lo, double hi) {
    auto anti = [&fit](double x) {
        const double t = x - fit.center;
        return t * (fit.coeff[0] + t * (fit.coeff[1] / 2 + t * (fit.coeff[2] / 3 + t * fit.coeff[3] / 4)));
    };
    return anti(hi) - anti(lo);
}

void prepare(std::vector<RDPoint>& curve) {
    if (curve.size() < 4) throw std::invalid_argument("bd_rate: need at least 4 points per curve");
    std::sort(curve.begin(), curve.end(),
              [](const RDPoint& a, const RDPoint& b) { return a.psnr < b.psnr; });
    for (size_t i = 0; i + 1 < curve.size(); ++i)
        if (!(curve[i].psnr < curve[i + 1].psnr))
            throw std::invalid_argument("bd_rate: PSNR values must be distinct");
    for (const RDPoint& p : curve)
        if (!(p.bpp > 0.0)) throw std::invalid_argument("bd_rate: rates must be positive");
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("psnr: dimension mismatch");
    if (a.pixels.size() != b.pixels.size()) throw std::invalid_argument("psnr: buffer mismatch");
    return mse_to_db(clamped_mse(a.pixels, b.pixels));
}

double psnr_from_predictions(const std::vector<double>& predictions, const ImageBuffer& image) {
    if (predictions.size() != image.pixels.size())
        throw std::invalid_argument("psnr: shape mismatch");
    return mse_to_db(clamped_mse(predictions, image.pixels));
}

double bpp(size_t byte_count, int width, int height) {
    if (width < 1 || height < 1) throw std::invalid_argument("bpp: zero pixels");
    return 8.0 * static_cast<double>(byte_count) /
           (static_cast<double>(width) * static_cast<double>(height));
}

double bd_rate(std::vector<RDPoint> anchor, std::vector<RDPoint> test) {
    prepare(anchor);
    prepare(test);
    const double lo = std::max(anchor.front().psnr, test.front().psnr);
    const double hi = std::min(anchor.back().psnr, test.back().psnr);
    if (!(lo < hi)) throw std::invalid_argument("bd_rate: PSNR ranges do not overlap");

    auto log_fit = [](const std::vector<RDPoint>& curve) {
        std::vector<double> x, y;
        for (const RDPoint& p : curve) {
            x.push_back(p.psnr);
            y.push_back(std::log10(p.bpp));
        }
        return fit_cubic(x, y);
    };
    const double ia = integrate(log_fit(anchor), lo, hi);
    const double it = integrate(log_fit(test), lo, hi);
    const double avg_diff = (it - ia) / (hi - lo);
    return (std::pow(10.0, avg_diff) - 1.0) * 100.0;
}

double mac_per_pixel(const std::vector<int>& layer_dims) {
    if (layer_dims.size() < 2) throw std::invalid_argument("mac_per_pixel: need at least one layer");
    double macs = 0.0;
    for (size_t l = 0; l + 1 < layer_dims.size(); ++l)
        macs += static_cast<double>(layer_dims[l]) * layer_dims[l + 1];
    return macs / 1000.0;
}

}  // namespace inrc
