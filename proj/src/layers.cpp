#include "cc2d/layers.hpp"

#include <Eigen/Core>

#include <cmath>

#include "cc2d/common.hpp"

namespace cc2d::nn {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatRM>;
using MapC = Eigen::Map<const MatRM>;

void im2col(const Tensor& x, int k, int stride, int pad, int ho, int wo, std::vector<double>& cols) {
    const int kk = k * k;
    const std::size_t ncols = std::size_t(ho) * wo;
    cols.assign(std::size_t(x.c) * kk * ncols, 0.0);
    for (int c = 0; c < x.c; ++c) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                double* dst = cols.data() + (std::size_t(c) * kk + std::size_t(ky) * k + kx) * ncols;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= x.h) continue;
                    const double* src = x.data() + (std::size_t(c) * x.h + iy) * x.w;
                    double* row = dst + std::size_t(oy) * wo;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        if (ix >= 0 && ix < x.w) row[ox] = src[ix];
                    }
                }
            }
        }
    }
}

void col2im(const std::vector<double>& cols, int c_in, int k, int stride, int pad, int ho, int wo,
            Tensor& gx) {
    const int kk = k * k;
    const std::size_t ncols = std::size_t(ho) * wo;
    for (int c = 0; c < c_in; ++c) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const double* src = cols.data() + (std::size_t(c) * kk + std::size_t(ky) * k + kx) * ncols;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= gx.h) continue;
                    double* dst = gx.data() + (std::size_t(c) * gx.h + iy) * gx.w;
                    const double* row = src + std::size_t(oy) * wo;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        if (ix >= 0 && ix < gx.w) dst[ix] += row[ox];
                    }
                }
            }
        }
    }
}

}  // namespace

Conv2d::Conv2d(int in_channels, int out_channels, int kernel, int stride_)
    : in_c(in_channels), out_c(out_channels), k(kernel), stride(stride_), pad(kernel / 2) {
    w.assign(std::size_t(out_c) * in_c * k * k, 0.0);
    b.assign(std::size_t(out_c), 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
}

void Conv2d::init_he(Rng& rng) {
    const double fan_in = double(in_c) * k * k;
    const double limit = std::sqrt(6.0 / fan_in);
    for (auto& x : w) x = rng.uniform(-limit, limit);
    std::fill(b.begin(), b.end(), 0.0);
}

Tensor Conv2d::forward(const Tensor& x, Cache* cache) const {
    if (x.c != in_c) throw NumericError("conv: channel mismatch");
    const auto [ho, wo] = out_size(x.h, x.w);
    static thread_local std::vector<double> scratch;
    std::vector<double>& cols = cache ? cache->cols : scratch;
    im2col(x, k, stride, pad, ho, wo, cols);
    if (cache) {
        cache->in_h = x.h;
        cache->in_w = x.w;
        cache->ho = ho;
        cache->wo = wo;
    }
    Tensor y(out_c, ho, wo);
    const std::size_t ncols = std::size_t(ho) * wo;
    MapC wm(w.data(), out_c, std::ptrdiff_t(in_c) * k * k);
    MapC cm(cols.data(), std::ptrdiff_t(in_c) * k * k, std::ptrdiff_t(ncols));
    MapM ym(y.data(), out_c, std::ptrdiff_t(ncols));
    ym.noalias() = wm * cm;
    for (int oc = 0; oc < out_c; ++oc) ym.row(oc).array() += b[std::size_t(oc)];
    return y;
}

Tensor Conv2d::backward(const Cache& cache, const Tensor& gy) {
    const std::size_t ncols = std::size_t(cache.ho) * cache.wo;
    MapC gym(gy.data(), out_c, std::ptrdiff_t(ncols));
    MapC cm(cache.cols.data(), std::ptrdiff_t(in_c) * k * k, std::ptrdiff_t(ncols));
    MapM gwm(gw.data(), out_c, std::ptrdiff_t(in_c) * k * k);
    gwm.noalias() += gym * cm.transpose();
    for (int oc = 0; oc < out_c; ++oc) gb[std::size_t(oc)] += gym.row(oc).sum();

    static thread_local std::vector<double> gcols;
    gcols.resize(cache.cols.size());
    MapM gcm(gcols.data(), std::ptrdiff_t(in_c) * k * k, std::ptrdiff_t(ncols));
    MapC wm(w.data(), out_c, std::ptrdiff_t(in_c) * k * k);
    gcm.noalias() = wm.transpose() * gym;

    Tensor gx(in_c, cache.in_h, cache.in_w);
    col2im(gcols, in_c, k, stride, pad, cache.ho, cache.wo, gx);
    return gx;
}

ChannelNorm::ChannelNorm(int channels_, double eps_) : channels(channels_), eps(eps_) {
    gamma.assign(std::size_t(channels), 1.0);
    beta.assign(std::size_t(channels), 0.0);
    ggamma.assign(gamma.size(), 0.0);
    gbeta.assign(beta.size(), 0.0);
}

Tensor ChannelNorm::forward(const Tensor& x, Cache* cache) const {
    if (x.c != channels) throw NumericError("norm: channel mismatch");
    Tensor y(x.c, x.h, x.w);
    const std::size_t n = x.plane();
    if (cache) {
        cache->xhat.resize(x.count());
        cache->inv_std.resize(std::size_t(x.c));
        cache->h = x.h;
        cache->w = x.w;
    }
    for (int c = 0; c < x.c; ++c) {
        const double* xc = x.data() + std::size_t(c) * n;
        double* yc = y.data() + std::size_t(c) * n;
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += xc[i];
        mean /= double(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = xc[i] - mean;
            var += d * d;
        }
        var /= double(n);
        const double inv_std = 1.0 / std::sqrt(var + eps);
        const double g = gamma[std::size_t(c)];
        const double bt = beta[std::size_t(c)];
        if (cache) {
            cache->inv_std[std::size_t(c)] = inv_std;
            double* xh = cache->xhat.data() + std::size_t(c) * n;
            for (std::size_t i = 0; i < n; ++i) {
                xh[i] = (xc[i] - mean) * inv_std;
                yc[i] = g * xh[i] + bt;
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) yc[i] = g * (xc[i] - mean) * inv_std + bt;
        }
    }
    return y;
}

Tensor ChannelNorm::backward(const Cache& cache, const Tensor& gy) {
    Tensor gx(gy.c, gy.h, gy.w);
    const std::size_t n = gy.plane();
    for (int c = 0; c < gy.c; ++c) {
        const double* gyc = gy.data() + std::size_t(c) * n;
        const double* xh = cache.xhat.data() + std::size_t(c) * n;
        double* gxc = gx.data() + std::size_t(c) * n;
        const double g = gamma[std::size_t(c)];
        const double inv_std = cache.inv_std[std::size_t(c)];
        double sum_gy = 0.0, sum_gy_xh = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum_gy += gyc[i];
            sum_gy_xh += gyc[i] * xh[i];
        }
        ggamma[std::size_t(c)] += sum_gy_xh;
        gbeta[std::size_t(c)] += sum_gy;
        const double invn = 1.0 / double(n);
        for (std::size_t i = 0; i < n; ++i) {
            gxc[i] = g * inv_std * (gyc[i] - invn * sum_gy - xh[i] * invn * sum_gy_xh);
        }
    }
    return gx;
}

Tensor leaky_relu(const Tensor& x, double slope) {
    Tensor y(x.c, x.h, x.w);
    for (std::size_t i = 0; i < x.count(); ++i) y.v[i] = x.v[i] > 0.0 ? x.v[i] : slope * x.v[i];
    return y;
}

Tensor leaky_relu_backward(const Tensor& y, const Tensor& gy, double slope) {
    Tensor gx(gy.c, gy.h, gy.w);
    for (std::size_t i = 0; i < gy.count(); ++i) gx.v[i] = y.v[i] > 0.0 ? gy.v[i] : slope * gy.v[i];
    return gx;
}

Tensor upsample2_nearest(const Tensor& x, int oh, int ow) {
    Tensor y(x.c, oh, ow);
    for (int c = 0; c < x.c; ++c)
        for (int yy = 0; yy < oh; ++yy)
            for (int xx = 0; xx < ow; ++xx) y.at(c, yy, xx) = x.at(c, yy / 2, xx / 2);
    return y;
}

Tensor upsample2_nearest_backward(const Tensor& gy, int in_h, int in_w) {
    Tensor gx(gy.c, in_h, in_w);
    for (int c = 0; c < gy.c; ++c)
        for (int yy = 0; yy < gy.h; ++yy)
            for (int xx = 0; xx < gy.w; ++xx) gx.at(c, yy / 2, xx / 2) += gy.at(c, yy, xx);
    return gx;
}

}  // namespace cc2d::nn
