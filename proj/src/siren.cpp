#include "inrc/siren.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>

#include "inrc/common.hpp"

namespace inrc {

namespace {

// Pixels are processed in fixed blocks; per-block partial sums are folded
// in block order, so losses and gradients do not depend on how blocks are
// distributed over threads.
constexpr int kPixelBlock = 128;
constexpr int kGroupSlots = 64;  // bounds partial-gradient memory

int max_dim(const std::vector<int>& dims) {
    int m = 0;
    for (int d : dims) m = std::max(m, d);
    return m;
}

// Evaluates layers for pixels [p0, p0+n), storing post-activations in
// act[l] (act[0] = coords) and pre-activations in pre[l].
void forward_block(const SirenNetwork& net, const double* coords, int p0, int n,
                   std::vector<std::vector<double>>& act,
                   std::vector<std::vector<double>>& pre) {
    const int layers = net.layer_count();
    std::memcpy(act[0].data(), coords + static_cast<size_t>(p0) * 2,
                sizeof(double) * static_cast<size_t>(n) * 2);
    for (int l = 0; l < layers; ++l) {
        const int in = net.layer_dims[l];
        const int out = net.layer_dims[l + 1];
        const double* w = net.weights[l].data();
        const double* b = net.biases[l].data();
        const double* a = act[l].data();
        double* z = pre[l].data();
        for (int p = 0; p < n; ++p) {
            const double* ap = a + static_cast<size_t>(p) * in;
            double* zp = z + static_cast<size_t>(p) * out;
            for (int o = 0; o < out; ++o) {
                const double* wo = w + static_cast<size_t>(o) * in;
                double s = b[o];
                for (int i = 0; i < in; ++i) s += wo[i] * ap[i];
                zp[o] = s;
            }
        }
        double* h = act[l + 1].data();
        const size_t count = static_cast<size_t>(n) * out;
        if (l + 1 < layers) {
            const double w0 = net.w0;
            for (size_t i = 0; i < count; ++i) h[i] = std::sin(w0 * z[i]);
        } else {
            std::memcpy(h, z, sizeof(double) * count);
        }
    }
}

int first_nonfinite_layer(const SirenNetwork& net, int n,
                          const std::vector<std::vector<double>>& pre) {
    for (int l = 0; l < net.layer_count(); ++l) {
        const size_t count = static_cast<size_t>(n) * net.layer_dims[l + 1];
        for (size_t i = 0; i < count; ++i)
            if (!std::isfinite(pre[l][i])) return l;
    }
    return -1;
}

struct Workspace {
    std::vector<std::vector<double>> act, pre;
    std::vector<double> d_cur, d_prev;
    std::vector<double> grad;  // flat, layer-major: W0, b0, W1, b1, ...
    double loss = 0.0;

    void init(const SirenNetwork& net, size_t flat_size) {
        const int layers = net.layer_count();
        act.resize(layers + 1);
        pre.resize(layers);
        for (int l = 0; l <= layers; ++l)
            act[l].resize(static_cast<size_t>(kPixelBlock) * net.layer_dims[l]);
        for (int l = 0; l < layers; ++l)
            pre[l].resize(static_cast<size_t>(kPixelBlock) * net.layer_dims[l + 1]);
        const size_t wide = static_cast<size_t>(kPixelBlock) * max_dim(net.layer_dims);
        d_cur.resize(wide);
        d_prev.resize(wide);
        grad.assign(flat_size, 0.0);
    }
};

struct FlatLayout {
    std::vector<size_t> w_off, b_off;
    size_t total = 0;

    explicit FlatLayout(const SirenNetwork& net) {
        const int layers = net.layer_count();
        w_off.resize(layers);
        b_off.resize(layers);
        for (int l = 0; l < layers; ++l) {
            w_off[l] = total;
            total += net.weights[l].size();
            b_off[l] = total;
            total += net.biases[l].size();
        }
    }
};

void check_grid(const SirenNetwork& net, const CoordinateGrid& grid) {
    net.validate();
    if (grid.width < 1 || grid.height < 1 ||
        grid.coords.size() != static_cast<size_t>(grid.pixel_count()) * 2)
        throw std::invalid_argument("grid does not match network input");
}

// Backward pass for one block. `d_out` holds dLoss/d(final activation).
void backward_block(const SirenNetwork& net, int n, Workspace& ws, const FlatLayout& lay) {
    const int layers = net.layer_count();
    for (int l = layers - 1; l >= 0; --l) {
        const int in = net.layer_dims[l];
        const int out = net.layer_dims[l + 1];
        // d_cur currently holds dLoss/d(act[l+1]); convert to dLoss/d(pre[l]).
        if (l + 1 < layers) {
            const double w0 = net.w0;
            const double* z = ws.pre[l].data();
            double* d = ws.d_cur.data();
            const size_t count = static_cast<size_t>(n) * out;
            for (size_t i = 0; i < count; ++i) d[i] *= w0 * std::cos(w0 * z[i]);
        }
        double* dw = ws.grad.data() + lay.w_off[l];
        double* db = ws.grad.data() + lay.b_off[l];
        const double* a = ws.act[l].data();
        const double* d = ws.d_cur.data();
        for (int p = 0; p < n; ++p) {
            const double* ap = a + static_cast<size_t>(p) * in;
            const double* dp = d + static_cast<size_t>(p) * out;
            for (int o = 0; o < out; ++o) {
                const double g = dp[o];
                db[o] += g;
                double* dwo = dw + static_cast<size_t>(o) * in;
                for (int i = 0; i < in; ++i) dwo[i] += g * ap[i];
            }
        }
        if (l > 0) {
            const double* w = net.weights[l].data();
            double* dprev = ws.d_prev.data();
            for (int p = 0; p < n; ++p) {
                const double* dp = d + static_cast<size_t>(p) * out;
                double* dq = dprev + static_cast<size_t>(p) * in;
                for (int i = 0; i < in; ++i) dq[i] = 0.0;
                for (int o = 0; o < out; ++o) {
                    const double g = dp[o];
                    const double* wo = w + static_cast<size_t>(o) * in;
                    for (int i = 0; i < in; ++i) dq[i] += g * wo[i];
                }
            }
            std::swap(ws.d_cur, ws.d_prev);
        }
    }
}

}  // namespace

int64_t SirenNetwork::parameter_count() const {
    int64_t total = 0;
    for (size_t l = 0; l < weights.size(); ++l)
        total += static_cast<int64_t>(weights[l].size()) + static_cast<int64_t>(biases[l].size());
    return total;
}

void SirenNetwork::validate() const {
    if (layer_dims.size() < 2) throw std::invalid_argument("network: need at least one layer");
    if (layer_dims.front() != 2 || layer_dims.back() != 3)
        throw std::invalid_argument("network: input must be 2-d, output 3-d");
    for (int d : layer_dims)
        if (d < 1) throw std::invalid_argument("network: layer dims must be positive");
    const size_t layers = layer_dims.size() - 1;
    if (weights.size() != layers || biases.size() != layers)
        throw std::invalid_argument("network: layer count mismatch");
    if (!(w0 > 0.0) || !std::isfinite(w0)) throw std::invalid_argument("network: w0 must be positive");
    for (size_t l = 0; l < layers; ++l) {
        const size_t in = layer_dims[l], out = layer_dims[l + 1];
        if (weights[l].size() != in * out) throw std::invalid_argument("network: weight shape mismatch");
        if (biases[l].size() != out) throw std::invalid_argument("network: bias shape mismatch");
        for (double v : weights[l])
            if (!std::isfinite(v)) throw std::invalid_argument("network: non-finite weight");
        for (double v : biases[l])
            if (!std::isfinite(v)) throw std::invalid_argument("network: non-finite bias");
    }
}

SirenNetwork init_siren(const std::vector<int>& layer_dims, double w0, uint64_t seed) {
    SirenNetwork net;
    net.layer_dims = layer_dims;
    net.w0 = w0;
    std::mt19937_64 rng(seed);
    auto uniform01 = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const int layers = static_cast<int>(layer_dims.size()) - 1;
    net.weights.resize(layers);
    net.biases.resize(layers);
    for (int l = 0; l < layers; ++l) {
        const int in = layer_dims[l], out = layer_dims[l + 1];
        const double bound = std::sqrt(6.0 / in) / w0;
        net.weights[l].resize(static_cast<size_t>(in) * out);
        for (double& w : net.weights[l]) w = -bound + 2.0 * bound * uniform01();
        net.biases[l].assign(out, 0.0);
    }
    net.validate();
    return net;
}

std::vector<double> forward(const SirenNetwork& net, const CoordinateGrid& grid) {
    check_grid(net, grid);
    const int n_pixels = grid.pixel_count();
    const int layers = net.layer_count();
    std::vector<double> out(static_cast<size_t>(n_pixels) * 3);
    const int n_blocks = (n_pixels + kPixelBlock - 1) / kPixelBlock;
#pragma omp parallel
    {
        std::vector<std::vector<double>> act(layers + 1), pre(layers);
        for (int l = 0; l <= layers; ++l)
            act[l].resize(static_cast<size_t>(kPixelBlock) * net.layer_dims[l]);
        for (int l = 0; l < layers; ++l)
            pre[l].resize(static_cast<size_t>(kPixelBlock) * net.layer_dims[l + 1]);
#pragma omp for schedule(static)
        for (int b = 0; b < n_blocks; ++b) {
            const int p0 = b * kPixelBlock;
            const int n = std::min(kPixelBlock, n_pixels - p0);
            forward_block(net, grid.coords.data(), p0, n, act, pre);
            std::memcpy(out.data() + static_cast<size_t>(p0) * 3, act[layers].data(),
                        sizeof(double) * static_cast<size_t>(n) * 3);
        }
    }
    return out;
}

double mse_loss(const std::vector<double>& predictions, const ImageBuffer& image) {
    const size_t count = static_cast<size_t>(image.width) * image.height * 3;
    if (image.width < 1 || image.height < 1 || image.pixels.size() != count)
        throw std::invalid_argument("mse_loss: malformed image");
    if (predictions.size() != count) throw std::invalid_argument("mse_loss: shape mismatch");
    const size_t stride = static_cast<size_t>(kPixelBlock) * 3;
    const size_t n_blocks = (count + stride - 1) / stride;
    std::vector<double> partial(n_blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (int64_t b = 0; b < static_cast<int64_t>(n_blocks); ++b) {
        const size_t i0 = b * stride;
        const size_t i1 = std::min(count, i0 + stride);
        double s = 0.0;
        for (size_t i = i0; i < i1; ++i) {
            const double r = predictions[i] - image.pixels[i];
            s += r * r;
        }
        partial[b] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total / static_cast<double>(count);
}

double loss_and_gradients(const SirenNetwork& net, const CoordinateGrid& grid,
                          const ImageBuffer& image,
                          const std::vector<double>* extra_target, double lambda,
                          GradientSet& out) {
    check_grid(net, grid);
    const int n_pixels = grid.pixel_count();
    const size_t count = static_cast<size_t>(n_pixels) * 3;
    if (image.pixels.size() != count || image.width != grid.width || image.height != grid.height)
        throw std::invalid_argument("gradients: image does not match grid");
    if (lambda < 0.0) throw std::invalid_argument("gradients: lambda must be nonnegative");
    if (extra_target && extra_target->size() != count)
        throw std::invalid_argument("gradients: extra target shape mismatch");
    if (lambda > 0.0 && !extra_target)
        throw std::invalid_argument("gradients: lambda > 0 requires an extra target");

    const int layers = net.layer_count();
    const FlatLayout lay(net);
    const double inv = 1.0 / static_cast<double>(count);
    const double* extra = extra_target ? extra_target->data() : nullptr;

    std::vector<double> grad_total(lay.total, 0.0);
    double loss_total = 0.0;
    const int n_blocks = (n_pixels + kPixelBlock - 1) / kPixelBlock;
    const int slots = std::min(kGroupSlots, n_blocks);
    std::vector<Workspace> ws(slots);
    for (auto& w : ws) w.init(net, lay.total);
    std::atomic<int> bad_layer{-1};

    for (int g0 = 0; g0 < n_blocks; g0 += slots) {
        const int gn = std::min(slots, n_blocks - g0);
#pragma omp parallel for schedule(static)
        for (int s = 0; s < gn; ++s) {
            Workspace& w = ws[s];
            std::fill(w.grad.begin(), w.grad.end(), 0.0);
            w.loss = 0.0;
            const int p0 = (g0 + s) * kPixelBlock;
            const int n = std::min(kPixelBlock, n_pixels - p0);
            forward_block(net, grid.coords.data(), p0, n, w.act, w.pre);
            const int bad = first_nonfinite_layer(net, n, w.pre);
            if (bad >= 0) {
                int expected = -1;
                bad_layer.compare_exchange_strong(expected, bad);
                continue;
            }
            const double* pred = w.act[layers].data();
            const double* img = image.pixels.data() + static_cast<size_t>(p0) * 3;
            const double* ext = extra ? extra + static_cast<size_t>(p0) * 3 : nullptr;
            double* d = w.d_cur.data();
            double loss = 0.0;
            const size_t nc = static_cast<size_t>(n) * 3;
            for (size_t i = 0; i < nc; ++i) {
                const double r1 = pred[i] - img[i];
                double g = 2.0 * r1;
                loss += r1 * r1;
                if (ext) {
                    const double r2 = pred[i] - ext[i];
                    g += lambda * 2.0 * r2;
                    loss += lambda * (r2 * r2);
                }
                d[i] = g * inv;
            }
            w.loss = loss;
            backward_block(net, n, w, lay);
        }
        if (bad_layer.load() >= 0)
            throw NumericError("gradients: non-finite activation in layer " +
                               std::to_string(bad_layer.load()));
        for (int s = 0; s < gn; ++s) {  // fixed fold order
            loss_total += ws[s].loss;
            const double* g = ws[s].grad.data();
            for (size_t i = 0; i < lay.total; ++i) grad_total[i] += g[i];
        }
    }

    out.d_weights.resize(layers);
    out.d_biases.resize(layers);
    for (int l = 0; l < layers; ++l) {
        out.d_weights[l].assign(grad_total.begin() + lay.w_off[l],
                                grad_total.begin() + lay.w_off[l] + net.weights[l].size());
        out.d_biases[l].assign(grad_total.begin() + lay.b_off[l],
                               grad_total.begin() + lay.b_off[l] + net.biases[l].size());
    }
    return loss_total * inv;
}

GradientSet gradients(const SirenNetwork& net, const CoordinateGrid& grid,
                      const ImageBuffer& image,
                      const std::vector<double>* extra_target, double lambda) {
    GradientSet g;
    loss_and_gradients(net, grid, image, extra_target, lambda, g);
    return g;
}

AdamState AdamState::zeros_like(const SirenNetwork& net) {
    AdamState st;
    const int layers = net.layer_count();
    st.m_weights.resize(layers);
    st.v_weights.resize(layers);
    st.m_biases.resize(layers);
    st.v_biases.resize(layers);
    for (int l = 0; l < layers; ++l) {
        st.m_weights[l].assign(net.weights[l].size(), 0.0);
        st.v_weights[l].assign(net.weights[l].size(), 0.0);
        st.m_biases[l].assign(net.biases[l].size(), 0.0);
        st.v_biases[l].assign(net.biases[l].size(), 0.0);
    }
    return st;
}

void adam_step(AdamState& state, SirenNetwork& net, const GradientSet& grads, double lr) {
    if (!(lr > 0.0)) throw std::invalid_argument("adam: lr must be positive");
    const int layers = net.layer_count();
    if (static_cast<int>(grads.d_weights.size()) != layers ||
        static_cast<int>(grads.d_biases.size()) != layers)
        throw std::invalid_argument("adam: gradient shape mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
    auto update = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                      const std::vector<double>& g) {
        if (g.size() != p.size()) throw std::invalid_argument("adam: gradient shape mismatch");
        for (size_t i = 0; i < p.size(); ++i) {
            if (!std::isfinite(g[i])) throw NumericError("adam: non-finite gradient");
            m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g[i];
            v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
        }
    };
    for (int l = 0; l < layers; ++l) {
        update(net.weights[l], state.m_weights[l], state.v_weights[l], grads.d_weights[l]);
        update(net.biases[l], state.m_biases[l], state.v_biases[l], grads.d_biases[l]);
    }
}

SirenNetwork fit_full_precision(const ImageBuffer& image, const FitConfig& config,
                                std::vector<double>* loss_trace) {
    image.validate();
    if (config.iterations < 1) throw std::invalid_argument("fit: iterations must be >= 1");
    SirenNetwork net = init_siren(config.layer_dims, config.w0, config.seed);
    const CoordinateGrid grid = make_grid(image.width, image.height);
    AdamState state = AdamState::zeros_like(net);
    GradientSet grads;
    if (loss_trace) {
        loss_trace->clear();
        loss_trace->reserve(config.iterations);
    }
    for (int it = 0; it < config.iterations; ++it) {
        double loss;
        try {
            loss = loss_and_gradients(net, grid, image, nullptr, 0.0, grads);
        } catch (const NumericError& e) {
            throw TrainingError("fit diverged at iteration " + std::to_string(it) + ": " + e.what());
        }
        if (!std::isfinite(loss))
            throw TrainingError("fit diverged at iteration " + std::to_string(it));
        if (loss_trace) loss_trace->push_back(loss);
        adam_step(state, net, grads, config.lr);
    }
    return net;
}

}  // namespace inrc
