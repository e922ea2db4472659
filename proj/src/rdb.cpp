#include "cc2d/rdb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cc2d/common.hpp"

namespace cc2d::rdb {

void LossConfig::validate() const {
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (beta <= 0.0) throw ConfigError("beta must be > 0");
    if (tau <= 0.0) throw ConfigError("tau must be > 0");
    if (epsilon <= 0.0) throw ConfigError("epsilon must be > 0");
    if (matrix_m < 1 || matrix_n < 1 || matrix_m % 2 == 0 || matrix_n % 2 == 0)
        throw ConfigError("matrix size must be odd and positive so a centered target exists");
    if (levels < 1) throw ConfigError("levels must be >= 1");
}

GridD similarity_map(std::span<const double> anchor, const Tensor& features, double epsilon,
                     CosineCache* cache) {
    if (int(anchor.size()) != features.c) throw NumericError("similarity_map: channel mismatch");
    const int c = features.c;
    double a2 = 0.0;
    for (int i = 0; i < c; ++i) a2 += anchor[std::size_t(i)] * anchor[std::size_t(i)];
    const double anchor_norm_raw = std::sqrt(a2);
    const double an = std::max(anchor_norm_raw, epsilon);

    GridD s(features.h, features.w);
    if (cache) {
        cache->feat_norm = GridD(features.h, features.w);
        cache->feat_guarded.assign(std::size_t(features.h) * features.w, 0);
        cache->anchor_norm = an;
        cache->anchor_guarded = anchor_norm_raw < epsilon;
    }
    const std::size_t plane = features.plane();
    for (int y = 0; y < features.h; ++y) {
        for (int x = 0; x < features.w; ++x) {
            const std::size_t off = std::size_t(y) * features.w + x;
            double dot = 0.0, v2 = 0.0;
            const double* base = features.data() + off;
            for (int i = 0; i < c; ++i) {
                const double vi = base[std::size_t(i) * plane];
                dot += anchor[std::size_t(i)] * vi;
                v2 += vi * vi;
            }
            const double vnorm_raw = std::sqrt(v2);
            const double vn = std::max(vnorm_raw, epsilon);
            s(y, x) = dot / (an * vn);
            if (cache) {
                cache->feat_norm(y, x) = vn;
                cache->feat_guarded[off] = vnorm_raw < epsilon ? 1 : 0;
            }
        }
    }
    if (cache) cache->s = s;
    return s;
}

std::vector<double> similarity_backward(std::span<const double> anchor, const Tensor& features,
                                        const CosineCache& cache, const GridD& gwindow,
                                        int origin_x, int origin_y, Tensor& gfeatures) {
    const int c = features.c;
    std::vector<double> ganchor(std::size_t(c), 0.0);
    const double an = cache.anchor_norm;
    const std::size_t plane = features.plane();
    for (int wy = 0; wy < gwindow.h; ++wy) {
        for (int wx = 0; wx < gwindow.w; ++wx) {
            const double gs = gwindow(wy, wx);
            if (gs == 0.0) continue;
            const int y = origin_y + wy;
            const int x = origin_x + wx;
            const std::size_t off = std::size_t(y) * features.w + x;
            const double vn = cache.feat_norm(y, x);
            const double s = cache.s(y, x);
            const double* v = features.data() + off;
            double* gv = gfeatures.data() + off;
            const bool v_guarded = cache.feat_guarded[off] != 0;
            for (int i = 0; i < c; ++i) {
                const double vi = v[std::size_t(i) * plane];
                // d s / d v_i = a_i/(an*vn) - s*v_i/vn^2  (norm term absent when guarded)
                double dv = anchor[std::size_t(i)] / (an * vn);
                if (!v_guarded) dv -= s * vi / (vn * vn);
                gv[std::size_t(i) * plane] += gs * dv;
                // d s / d a_i = v_i/(an*vn) - s*a_i/an^2
                double da = vi / (an * vn);
                if (!cache.anchor_guarded) da -= s * anchor[std::size_t(i)] / (an * an);
                ganchor[std::size_t(i)] += gs * da;
            }
        }
    }
    return ganchor;
}

InterestMatrix crop_interest(const GridD& similarity, int center_x, int center_y, int m, int n,
                             int level) {
    if (m > similarity.w || n > similarity.h)
        throw DataError("crop_interest: similarity grid smaller than the window");
    if (!similarity.contains(center_y, center_x))
        throw DataError("crop_interest: center outside the similarity grid");
    const int ox = std::clamp(center_x - m / 2, 0, similarity.w - m);
    const int oy = std::clamp(center_y - n / 2, 0, similarity.h - n);
    InterestMatrix win;
    win.values = GridD(n, m);
    win.level = level;
    win.origin_x = ox;
    win.origin_y = oy;
    win.target_x = center_x - ox;
    win.target_y = center_y - oy;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < m; ++x) {
            const double s = similarity(oy + y, ox + x);
            if (s < -1.0 - 1e-6 || s > 1.0 + 1e-6)
                throw NumericError("crop_interest: similarity value outside [-1, 1]");
            win.values(y, x) = s;
        }
    }
    return win;
}

GridD distance_map(int target_x, int target_y, int m, int n) {
    if (target_x < 0 || target_x >= m || target_y < 0 || target_y >= n)
        throw DataError("distance_map: target outside the window");
    GridD d(n, m);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < m; ++x) {
            const double dx = double(x - target_x);
            const double dy = double(y - target_y);
            d(y, x) = std::sqrt(dx * dx + dy * dy);
        }
    }
    return d;
}

BiasedMatrix apply_rdb(const InterestMatrix& window, const GridD& distances, double alpha,
                       double beta, bool literal_clip) {
    if (distances.h != window.values.h || distances.w != window.values.w)
        throw DataError("apply_rdb: shape mismatch between window and distance grid");
    BiasedMatrix out;
    out.w = GridD(window.values.h, window.values.w);
    out.b = GridD(window.values.h, window.values.w);
    out.d = distances;
    out.target_x = window.target_x;
    out.target_y = window.target_y;
    for (int y = 0; y < window.values.h; ++y) {
        for (int x = 0; x < window.values.w; ++x) {
            const double d = distances(y, x);
            const double b = literal_clip ? alpha * std::clamp(d, 0.0, beta)
                                          : std::clamp(alpha * d, 0.0, beta);
            out.b(y, x) = b;
            out.w(y, x) = window.values(y, x) + b;
        }
    }
    return out;
}

std::pair<double, GridD> ce_layer_loss(const GridD& w, double tau, int target_x, int target_y) {
    if (!w.contains(target_y, target_x)) throw DataError("ce_layer_loss: target outside the window");
    double wmax = -std::numeric_limits<double>::infinity();
    for (double v : w.v) {
        if (!std::isfinite(v)) throw NumericError("ce_layer_loss: non-finite entry");
        wmax = std::max(wmax, v);
    }
    GridD q(w.h, w.w);
    double z = 0.0;
    for (std::size_t i = 0; i < w.count(); ++i) {
        q.v[i] = std::exp((w.v[i] - wmax) * tau);
        z += q.v[i];
    }
    for (double& qi : q.v) qi /= z;
    const double loss = -((w(target_y, target_x) - wmax) * tau - std::log(z));
    return {loss, q};
}

std::pair<double, GridD> ce_layer_loss(const BiasedMatrix& biased, double tau) {
    return ce_layer_loss(biased.w, tau, biased.target_x, biased.target_y);
}

GridD analytic_gradient(const GridD& w, double tau, int target_x, int target_y) {
    auto [loss, q] = ce_layer_loss(w, tau, target_x, target_y);
    (void)loss;
    GridD g(w.h, w.w);
    for (std::size_t i = 0; i < w.count(); ++i) g.v[i] = tau * q.v[i];
    g(target_y, target_x) = tau * (q(target_y, target_x) - 1.0);
    return g;
}

GridD analytic_gradient(const BiasedMatrix& biased, double tau) {
    return analytic_gradient(biased.w, tau, biased.target_x, biased.target_y);
}

double ssl_total_loss(std::span<const double> level_losses) {
    double total = 0.0;
    for (double l : level_losses) total += l;
    return total;
}

}  // namespace cc2d::rdb
