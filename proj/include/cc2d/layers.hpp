#pragma once

#include <string>
#include <vector>

#include "cc2d/rng.hpp"
#include "cc2d/tensor.hpp"

namespace cc2d::nn {

// Flat, ordered view over a model's parameter and gradient buffers. The
// registration order is the serialization and optimizer order, so it must be
// stable across runs.
struct ParamTable {
    struct Entry {
        std::string name;
        std::vector<double>* value;
        std::vector<double>* grad;
    };
    std::vector<Entry> entries;

    void add(std::string name, std::vector<double>& value, std::vector<double>& grad) {
        entries.push_back({std::move(name), &value, &grad});
    }
    std::size_t total_size() const {
        std::size_t n = 0;
        for (const auto& e : entries) n += e.value->size();
        return n;
    }
    void zero_grads() {
        for (auto& e : entries) std::fill(e.grad->begin(), e.grad->end(), 0.0);
    }
};

// 2-D convolution, square kernel, "same" padding for odd kernels. Forward and
// backward run as im2col + GEMM; backward accumulates parameter gradients.
struct Conv2d {
    int in_c = 0, out_c = 0, k = 1, stride = 1, pad = 0;
    std::vector<double> w, b;    // w: out_c x (in_c*k*k), row-major
    std::vector<double> gw, gb;

    struct Cache {
        std::vector<double> cols;  // (in_c*k*k) x (ho*wo)
        int in_h = 0, in_w = 0, ho = 0, wo = 0;
    };

    Conv2d() = default;
    Conv2d(int in_channels, int out_channels, int kernel, int stride_);

    void init_he(Rng& rng);

    SizeHW out_size(int in_h, int in_w) const {
        return {(in_h + 2 * pad - k) / stride + 1, (in_w + 2 * pad - k) / stride + 1};
    }

    Tensor forward(const Tensor& x, Cache* cache = nullptr) const;
    // Returns the gradient w.r.t. the input; adds into gw/gb.
    Tensor backward(const Cache& cache, const Tensor& gy);

    void register_params(const std::string& prefix, ParamTable& table) {
        table.add(prefix + ".w", w, gw);
        table.add(prefix + ".b", b, gb);
    }
};

// Per-channel normalization over the spatial extent of the current sample,
// with a learned affine. Statistics are recomputed per input, so training and
// inference follow the same code path and results do not depend on batch
// composition.
struct ChannelNorm {
    int channels = 0;
    double eps = 1e-5;
    std::vector<double> gamma, beta;
    std::vector<double> ggamma, gbeta;

    struct Cache {
        std::vector<double> xhat;     // normalized activations, c*h*w
        std::vector<double> inv_std;  // per channel
        int h = 0, w = 0;
    };

    ChannelNorm() = default;
    explicit ChannelNorm(int channels_, double eps_ = 1e-5);

    Tensor forward(const Tensor& x, Cache* cache = nullptr) const;
    Tensor backward(const Cache& cache, const Tensor& gy);

    void register_params(const std::string& prefix, ParamTable& table) {
        table.add(prefix + ".gamma", gamma, ggamma);
        table.add(prefix + ".beta", beta, gbeta);
    }
};

Tensor leaky_relu(const Tensor& x, double slope);
// Gradient through leaky_relu; `y` is the forward output (its sign matches
// the input's for slope > 0).
Tensor leaky_relu_backward(const Tensor& y, const Tensor& gy, double slope);

// Nearest-neighbour 2x upsampling, cropped to (oh, ow); oh/ow must be 2*h or
// 2*h-1 (ceil-halving partner sizes).
Tensor upsample2_nearest(const Tensor& x, int oh, int ow);
Tensor upsample2_nearest_backward(const Tensor& gy, int in_h, int in_w);

}  // namespace cc2d::nn
