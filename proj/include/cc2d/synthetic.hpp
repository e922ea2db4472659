#pragma once

#include <cstdint>

#include "cc2d/dataset.hpp"

namespace cc2d::data {

// Synthetic datasets: a shared procedural "anatomy" (overlapping ellipse
// ridges, stripe bundles, landmark blobs plus look-alike distractors), warped
// per sample by a smooth low-frequency displacement field. Landmarks ride the
// analytic forward map, so ground truth is exact to floating point.
struct SyntheticConfig {
    int count = 32;
    int num_landmarks = 5;
    SizeHW size{192, 192};
    int test_count = -1;          // -1: count / 4
    double margin = -1.0;         // landmark-free border, px; -1: min(h, w) / 4
    double max_displacement = -1.0;  // px; -1: 8 * min(h, w) / 192
    double spacing_mm = 1.0;
    double noise_sigma = 0.01;
};

DatasetSplit generate_synthetic(std::uint64_t seed, const SyntheticConfig& cfg);

inline DatasetSplit generate_synthetic(std::uint64_t seed, int count, int num_landmarks,
                                       SizeHW size) {
    SyntheticConfig cfg;
    cfg.count = count;
    cfg.num_landmarks = num_landmarks;
    cfg.size = size;
    return generate_synthetic(seed, cfg);
}

}  // namespace cc2d::data
