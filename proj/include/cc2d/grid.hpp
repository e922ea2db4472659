#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cc2d/common.hpp"

namespace cc2d {

// Dense 2-D array, row-major. Used for images, similarity maps and heatmaps.
template <typename T>
struct Grid {
    int h = 0;
    int w = 0;
    std::vector<T> v;

    Grid() = default;
    Grid(int h_, int w_, T fill = T{}) : h(h_), w(w_), v(std::size_t(h_) * std::size_t(w_), fill) {}

    T& operator()(int y, int x) { return v[std::size_t(y) * w + x]; }
    const T& operator()(int y, int x) const { return v[std::size_t(y) * w + x]; }

    bool contains(int y, int x) const { return y >= 0 && y < h && x >= 0 && x < w; }
    std::size_t count() const { return v.size(); }
    SizeHW size() const { return {h, w}; }
    void fill(T value) { std::fill(v.begin(), v.end(), value); }
};

using GridD = Grid<double>;
using GridF = Grid<float>;

enum class Border { Clamp, Reflect };

inline int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1, n+1 -> n-2, ...
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

inline int border_index(int i, int n, Border mode) {
    return mode == Border::Clamp ? clamp_index(i, n) : reflect_index(i, n);
}

inline double sample_bilinear(const GridD& g, double x, double y, Border mode = Border::Clamp) {
    const int x0 = int(std::floor(x));
    const int y0 = int(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const int xa = border_index(x0, g.w, mode);
    const int xb = border_index(x0 + 1, g.w, mode);
    const int ya = border_index(y0, g.h, mode);
    const int yb = border_index(y0 + 1, g.h, mode);
    const double top = (1.0 - fx) * g(ya, xa) + fx * g(ya, xb);
    const double bot = (1.0 - fx) * g(yb, xa) + fx * g(yb, xb);
    return (1.0 - fy) * top + fy * bot;
}

// Bilinear resize with the half-pixel (align-corners = false) convention.
inline GridD resize_bilinear(const GridD& src, int oh, int ow) {
    if (oh <= 0 || ow <= 0) throw DataError("resize_bilinear: target size must be positive");
    GridD out(oh, ow);
    const double sy = double(src.h) / oh;
    const double sx = double(src.w) / ow;
    for (int y = 0; y < oh; ++y) {
        const double srcy = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < ow; ++x) {
            const double srcx = (x + 0.5) * sx - 0.5;
            out(y, x) = sample_bilinear(src, srcx, srcy, Border::Clamp);
        }
    }
    return out;
}

}  // namespace cc2d
