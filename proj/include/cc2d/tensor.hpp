#pragma once

#include <cstddef>
#include <vector>

#include "cc2d/grid.hpp"

namespace cc2d {

// Dense 3-D array (channels, height, width), channel-major.
struct Tensor {
    int c = 0;
    int h = 0;
    int w = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_, double fill = 0.0)
        : c(c_), h(h_), w(w_), v(std::size_t(c_) * h_ * w_, fill) {}

    double& at(int ch, int y, int x) { return v[(std::size_t(ch) * h + y) * w + x]; }
    const double& at(int ch, int y, int x) const { return v[(std::size_t(ch) * h + y) * w + x]; }

    std::size_t plane() const { return std::size_t(h) * w; }
    std::size_t count() const { return v.size(); }
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
    void zero() { std::fill(v.begin(), v.end(), 0.0); }

    bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }

    static Tensor from_grid(const GridD& g) {
        Tensor t(1, g.h, g.w);
        t.v = g.v;
        return t;
    }

    GridD channel(int ch) const {
        GridD g(h, w);
        std::copy_n(v.begin() + std::ptrdiff_t(plane()) * ch, plane(), g.v.begin());
        return g;
    }
};

}  // namespace cc2d
