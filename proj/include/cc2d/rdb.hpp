#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cc2d/grid.hpp"
#include "cc2d/tensor.hpp"

namespace cc2d::rdb {

// Hyperparameters of the self-supervised matching objective.
struct LossConfig {
    double alpha = 0.1;   // distance-bias slope, per window pixel
    double beta = 0.7;    // bias cap
    double tau = 10.0;    // softmax temperature
    int matrix_m = 19;    // window extent along x (must be odd)
    int matrix_n = 19;    // window extent along y (must be odd)
    int levels = 5;
    double epsilon = 1e-8;  // cosine-norm guard
    // Literal reading of the bias: alpha * clip(d, 0, beta) instead of
    // clip(alpha * d, 0, beta). Kept as a switch for comparison runs; with the
    // defaults it collapses the bias to a constant for every negative.
    bool literal_clip = false;

    void validate() const;  // alpha = 0 is allowed and disables the bias
};

// M x N window cropped from a similarity map around the ground-truth cell.
struct InterestMatrix {
    GridD values;  // matrix_n rows x matrix_m cols
    int target_x = 0, target_y = 0;  // (m_t, n_t), coordinates inside the window
    int level = 0;
    int origin_x = 0, origin_y = 0;  // window origin in the full similarity grid
};

struct BiasedMatrix {
    GridD w;  // s + b
    GridD b;  // bias, in [0, beta], 0 at the target
    GridD d;  // window distances to the target
    int target_x = 0, target_y = 0;
};

// Forward state of a cosine-similarity map, kept for the backward pass.
struct CosineCache {
    GridD s;                 // the similarity values
    GridD feat_norm;         // guarded per-pixel feature norms
    std::vector<std::uint8_t> feat_guarded;  // 1 where the guard clamped the norm
    double anchor_norm = 0.0;
    bool anchor_guarded = false;
};

// Per-pixel cosine similarity between one anchor vector and every feature
// vector of a map. Norm denominators are guarded by max(norm, epsilon).
GridD similarity_map(std::span<const double> anchor, const Tensor& features, double epsilon,
                     CosineCache* cache = nullptr);

// Chain rule through similarity_map for a gradient supported on a window of
// the similarity grid. Returns the anchor gradient and adds the feature-map
// gradient into `gfeatures` (which must be zeroed/shaped by the caller).
std::vector<double> similarity_backward(std::span<const double> anchor, const Tensor& features,
                                        const CosineCache& cache, const GridD& gwindow,
                                        int origin_x, int origin_y, Tensor& gfeatures);

// Window centered on (center_x, center_y), clamped to the grid by shifting
// (never shrinking). The target is the center's coordinate within the window.
InterestMatrix crop_interest(const GridD& similarity, int center_x, int center_y, int m, int n,
                             int level = 0);

// Euclidean distances to (target_x, target_y) on an m x n integer lattice.
GridD distance_map(int target_x, int target_y, int m, int n);

BiasedMatrix apply_rdb(const InterestMatrix& window, const GridD& distances, double alpha,
                       double beta, bool literal_clip = false);

// Temperature softmax cross-entropy over all window entries.
// Returns (-log q_target, q).
std::pair<double, GridD> ce_layer_loss(const GridD& w, double tau, int target_x, int target_y);
std::pair<double, GridD> ce_layer_loss(const BiasedMatrix& biased, double tau);

// d(loss)/d(similarity): tau*q at the negatives, tau*(q_target - 1) at the
// target. Entries sum to zero.
GridD analytic_gradient(const GridD& w, double tau, int target_x, int target_y);
GridD analytic_gradient(const BiasedMatrix& biased, double tau);

double ssl_total_loss(std::span<const double> level_losses);

}  // namespace cc2d::rdb
