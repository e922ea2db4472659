#include "cc2d/augment.hpp"

#include <algorithm>
#include <cmath>

namespace cc2d::aug {

namespace {
constexpr double kPi = 3.14159265358979323846;

Point patch_center(SizeHW size) { return {(size.w - 1) / 2.0, (size.h - 1) / 2.0}; }
}  // namespace

Point rotate_point(Point p, Point center, double angle_deg) {
    const double t = angle_deg * kPi / 180.0;
    const double c = std::cos(t), s = std::sin(t);
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    // Counterclockwise on screen: with y pointing down this is the clockwise
    // rotation matrix of textbook (y-up) coordinates.
    return {center.x + c * dx + s * dy, center.y - s * dx + c * dy};
}

std::pair<GridD, Point> apply_rotation(const GridD& patch, Point point, double angle_deg) {
    const Point c = patch_center({patch.h, patch.w});
    if (angle_deg == 0.0) return {patch, point};
    GridD out(patch.h, patch.w);
    for (int y = 0; y < patch.h; ++y) {
        for (int x = 0; x < patch.w; ++x) {
            const Point src = rotate_point({double(x), double(y)}, c, -angle_deg);
            out(y, x) = sample_bilinear(patch, src.x, src.y, Border::Reflect);
        }
    }
    return {std::move(out), rotate_point(point, c, angle_deg)};
}

GridD apply_color_jitter(const GridD& patch, double brightness_delta, double contrast_scale,
                         double gamma) {
    GridD out(patch.h, patch.w);
    for (std::size_t i = 0; i < patch.count(); ++i) {
        double v = std::clamp(patch.v[i] + brightness_delta, 0.0, 1.0);
        v = std::clamp((v - 0.5) * contrast_scale + 0.5, 0.0, 1.0);
        out.v[i] = std::clamp(std::pow(v, gamma), 0.0, 1.0);
    }
    return out;
}

Point replay_transform(const TransformLog& log, Point source, SizeHW patch_size) {
    const Point in_patch{source.x - log.crop_x, source.y - log.crop_y};
    return rotate_point(in_patch, patch_center(patch_size), log.angle_deg);
}

TrainingPair sample_training_pair(const data::ImageSample& sample, Rng& rng, SizeHW patch_size,
                                  int margin, const JitterRanges& ranges) {
    const int h = sample.pixels.h, w = sample.pixels.w;
    const int ph = patch_size.h, pw = patch_size.w;
    if (ph > h || pw > w) throw DataError("sample_training_pair: patch larger than image");
    if (margin < 0 || 2 * margin >= std::min(ph, pw) - 1)
        throw ConfigError("sample_training_pair: margin must satisfy 0 <= 2*margin < patch-1");

    // Target point, uniform over positions a patch can contain with the
    // requested border margin.
    const Point target{rng.uniform(margin, w - 1.0 - margin), rng.uniform(margin, h - 1.0 - margin)};

    auto offset_range = [&](double coord, int patch_extent, int image_extent) {
        const int lo = std::max(0, int(std::ceil(coord - (patch_extent - 1 - margin))));
        const int hi = std::min(image_extent - patch_extent, int(std::floor(coord - margin)));
        return std::pair<int, int>{lo, hi};
    };
    const auto [lox, hix] = offset_range(target.x, pw, w);
    const auto [loy, hiy] = offset_range(target.y, ph, h);
    const int crop_x = lox + rng.uniform_int(hix - lox + 1);
    const int crop_y = loy + rng.uniform_int(hiy - loy + 1);

    GridD patch(ph, pw);
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x) patch(y, x) = sample.pixels(crop_y + y, crop_x + x);

    PatchSample ps;
    ps.source_point = target;
    ps.log.crop_x = crop_x;
    ps.log.crop_y = crop_y;
    ps.log.angle_deg = rng.uniform(-ranges.rot_max_deg, ranges.rot_max_deg);

    Point anchor{target.x - crop_x, target.y - crop_y};
    auto [rotated, rotated_anchor] = apply_rotation(patch, anchor, ps.log.angle_deg);

    ps.log.brightness = rng.uniform(-ranges.brightness, ranges.brightness);
    ps.log.contrast = rng.uniform(ranges.contrast_lo, ranges.contrast_hi);
    ps.log.gamma = rng.uniform(ranges.gamma_lo, ranges.gamma_hi);
    ps.patch = apply_color_jitter(rotated, ps.log.brightness, ps.log.contrast, ps.log.gamma);
    ps.anchor = rotated_anchor;

    if (ps.anchor.x < 0.0 || ps.anchor.x >= pw || ps.anchor.y < 0.0 || ps.anchor.y >= ph)
        throw NumericError("sample_training_pair: rotated anchor left the patch");
    return {target, std::move(ps)};
}

}  // namespace cc2d::aug
