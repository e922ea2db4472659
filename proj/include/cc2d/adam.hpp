#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cc2d/layers.hpp"

namespace cc2d::nn {

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
public:
    explicit Adam(std::size_t total_size, AdamHyper hyper = {})
        : m_(total_size, 0.0), v_(total_size, 0.0), hyper_(hyper) {}

    void step(ParamTable& params, double lr) {
        ++t_;
        const double bc1 = 1.0 - std::pow(hyper_.beta1, double(t_));
        const double bc2 = 1.0 - std::pow(hyper_.beta2, double(t_));
        std::size_t off = 0;
        for (auto& e : params.entries) {
            auto& w = *e.value;
            auto& g = *e.grad;
            for (std::size_t i = 0; i < w.size(); ++i) {
                double& m = m_[off + i];
                double& v = v_[off + i];
                m = hyper_.beta1 * m + (1.0 - hyper_.beta1) * g[i];
                v = hyper_.beta2 * v + (1.0 - hyper_.beta2) * g[i] * g[i];
                const double mhat = m / bc1;
                const double vhat = v / bc2;
                w[i] -= lr * mhat / (std::sqrt(vhat) + hyper_.eps);
            }
            off += w.size();
        }
    }

    long steps_taken() const { return t_; }

private:
    std::vector<double> m_, v_;
    AdamHyper hyper_;
    long t_ = 0;
};

}  // namespace cc2d::nn
