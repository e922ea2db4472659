#pragma once

#include "cc2d/dataset.hpp"
#include "cc2d/rng.hpp"

namespace cc2d::aug {

struct JitterRanges {
    double brightness = 0.2;  // additive delta drawn from [-brightness, brightness]
    double contrast_lo = 0.8, contrast_hi = 1.25;
    double gamma_lo = 0.8, gamma_hi = 1.25;
    double rot_max_deg = 15.0;
};

// Record of the augmentation applied to a patch, sufficient to replay the
// forward transform analytically.
struct TransformLog {
    int crop_x = 0, crop_y = 0;  // patch origin in the full image
    double angle_deg = 0.0;      // rotation about the patch center
    double brightness = 0.0;
    double contrast = 1.0;
    double gamma = 1.0;
};

struct PatchSample {
    GridD patch;         // H_p x W_p, intensities in [0, 1]
    Point anchor;        // augmented anchor, in-patch coordinates
    Point source_point;  // the selected target point in the full image
    TransformLog log;
};

// The selected target point plus the augmented patch that contains it. The
// full image X_r is the sample's own pixel grid.
struct TrainingPair {
    Point target;  // P_r
    PatchSample patch;
};

// Rotation of a point about `center`, counterclockwise in screen orientation
// (y grows downward).
Point rotate_point(Point p, Point center, double angle_deg);

// Rotates the patch about its center (bilinear resampling, reflected edge
// padding) and moves the point through the same rotation analytically.
std::pair<GridD, Point> apply_rotation(const GridD& patch, Point point, double angle_deg);

// Brightness shift, contrast about 0.5, then gamma; the result is clamped to
// [0, 1] after each stage. Geometry is untouched.
GridD apply_color_jitter(const GridD& patch, double brightness_delta, double contrast_scale,
                         double gamma);

// Applies the logged transform to a full-image point, reproducing the
// in-patch anchor. Exposed for invariant checks.
Point replay_transform(const TransformLog& log, Point source, SizeHW patch_size);

TrainingPair sample_training_pair(const data::ImageSample& sample, Rng& rng, SizeHW patch_size,
                                  int margin, const JitterRanges& ranges = {});

}  // namespace cc2d::aug
