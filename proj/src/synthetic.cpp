#include "cc2d/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cc2d/rng.hpp"

namespace cc2d::data {

namespace {

constexpr double kPi = 3.14159265358979323846;

// One low-frequency sinusoidal basis term of a displacement component.
struct FieldTerm {
    double amp = 0.0;
    double kx = 0.0, ky = 0.0;  // cycles over the image extent
    double phase = 0.0;
};

struct DisplacementField {
    std::vector<FieldTerm> ux, uy;
    double inv_h = 0.0, inv_w = 0.0;

    Point eval(Point p) const {
        double dx = 0.0, dy = 0.0;
        for (const auto& t : ux)
            dx += t.amp * std::sin(2.0 * kPi * (t.kx * p.x * inv_w + t.ky * p.y * inv_h) + t.phase);
        for (const auto& t : uy)
            dy += t.amp * std::sin(2.0 * kPi * (t.kx * p.x * inv_w + t.ky * p.y * inv_h) + t.phase);
        return {dx, dy};
    }

    // Inverse of q -> q + u(q) by fixed-point iteration; the field is a
    // contraction for the displacement magnitudes used here.
    Point invert(Point q) const {
        Point p = q;
        for (int it = 0; it < 30; ++it) {
            const Point u = eval(p);
            const Point next{q.x - u.x, q.y - u.y};
            if (std::abs(next.x - p.x) + std::abs(next.y - p.y) < 1e-12) return next;
            p = next;
        }
        return p;
    }
};

DisplacementField make_field(Rng& rng, double max_disp, SizeHW size) {
    DisplacementField f;
    f.inv_h = 1.0 / size.h;
    f.inv_w = 1.0 / size.w;
    auto fill = [&](std::vector<FieldTerm>& terms) {
        double amp_sum = 0.0;
        for (int i = 0; i < 3; ++i) {
            FieldTerm t;
            t.amp = rng.uniform(-1.0, 1.0);
            t.kx = rng.uniform(-2.0, 2.0);
            t.ky = rng.uniform(-2.0, 2.0);
            t.phase = rng.uniform(0.0, 2.0 * kPi);
            amp_sum += std::abs(t.amp);
            terms.push_back(t);
        }
        const double strength = rng.uniform(0.6, 1.0);
        const double scale = amp_sum > 0.0 ? max_disp * strength / amp_sum : 0.0;
        for (auto& t : terms) t.amp *= scale;
    };
    fill(f.ux);
    fill(f.uy);
    return f;
}

struct Ellipse {
    Point center;
    double a = 1.0, b = 1.0, theta = 0.0, amp = 0.0, sigma = 2.0;
};

struct StripeBand {
    double angle = 0.0, period = 20.0, amp = 0.0;
    Point center;
    double band_sigma = 40.0;
};

struct Blob {
    Point center;
    double amp_dot = 0.5, sigma_dot = 2.5;
    double amp_ring = 0.3, ring_r = 6.0, sigma_ring = 2.0;
};

struct Anatomy {
    double bg_amp[2] = {0.0, 0.0};
    double bg_kx[2] = {0.0, 0.0}, bg_ky[2] = {0.0, 0.0}, bg_phase[2] = {0.0, 0.0};
    std::vector<Ellipse> ellipses;
    std::vector<StripeBand> stripes;
    std::vector<Blob> blobs;       // landmark structures first, then distractors
    int num_landmarks = 0;
    SizeHW size;

    double eval(Point p) const {
        double v = 0.35;
        for (int i = 0; i < 2; ++i)
            v += bg_amp[i] *
                 std::cos(2.0 * kPi * (bg_kx[i] * p.x / size.w + bg_ky[i] * p.y / size.h) +
                          bg_phase[i]);
        for (const auto& e : ellipses) {
            const double dx = p.x - e.center.x;
            const double dy = p.y - e.center.y;
            const double c = std::cos(e.theta), s = std::sin(e.theta);
            const double u = c * dx + s * dy;
            const double w = -s * dx + c * dy;
            const double r = std::sqrt((u / e.a) * (u / e.a) + (w / e.b) * (w / e.b));
            const double dist = (r - 1.0) * 0.5 * (e.a + e.b);
            v += e.amp * std::exp(-dist * dist / (2.0 * e.sigma * e.sigma));
        }
        for (const auto& st : stripes) {
            const double c = std::cos(st.angle), s = std::sin(st.angle);
            const double t = c * (p.x - st.center.x) + s * (p.y - st.center.y);
            const double n = -s * (p.x - st.center.x) + c * (p.y - st.center.y);
            const double envelope = std::exp(-n * n / (2.0 * st.band_sigma * st.band_sigma));
            v += st.amp * envelope * 0.5 * (1.0 + std::cos(2.0 * kPi * t / st.period));
        }
        for (const auto& b : blobs) {
            const double dx = p.x - b.center.x;
            const double dy = p.y - b.center.y;
            const double r2 = dx * dx + dy * dy;
            const double r = std::sqrt(r2);
            v += b.amp_dot * std::exp(-r2 / (2.0 * b.sigma_dot * b.sigma_dot));
            const double dr = r - b.ring_r;
            v -= b.amp_ring * std::exp(-dr * dr / (2.0 * b.sigma_ring * b.sigma_ring));
        }
        return v;
    }
};

Anatomy make_anatomy(Rng& rng, const SyntheticConfig& cfg, double margin, double max_disp) {
    const int h = cfg.size.h, w = cfg.size.w;
    const double scale = std::min(h, w) / 192.0;
    Anatomy a;
    a.size = cfg.size;
    a.num_landmarks = cfg.num_landmarks;

    for (int i = 0; i < 2; ++i) {
        a.bg_amp[i] = rng.uniform(0.04, 0.10);
        a.bg_kx[i] = rng.uniform(0.4, 1.4);
        a.bg_ky[i] = rng.uniform(0.4, 1.4);
        a.bg_phase[i] = rng.uniform(0.0, 2.0 * kPi);
    }

    const int n_ellipses = 6;
    for (int i = 0; i < n_ellipses; ++i) {
        Ellipse e;
        e.center = {rng.uniform(0.2 * w, 0.8 * w), rng.uniform(0.2 * h, 0.8 * h)};
        e.a = rng.uniform(0.12, 0.35) * std::min(h, w);
        e.b = rng.uniform(0.12, 0.35) * std::min(h, w);
        e.theta = rng.uniform(0.0, kPi);
        e.amp = rng.uniform(0.18, 0.40);
        e.sigma = rng.uniform(1.5, 3.5) * scale;
        a.ellipses.push_back(e);
    }

    // Two repeating stripe bundles: self-similar texture that produces
    // look-alike structures far away from each other.
    for (int i = 0; i < 2; ++i) {
        StripeBand st;
        st.angle = rng.uniform(0.0, kPi);
        st.period = rng.uniform(18.0, 30.0) * scale;
        st.amp = rng.uniform(0.10, 0.20);
        st.center = {rng.uniform(0.25 * w, 0.75 * w), rng.uniform(0.25 * h, 0.75 * h)};
        st.band_sigma = rng.uniform(0.15, 0.3) * std::min(h, w);
        a.stripes.push_back(st);
    }

    // Landmark positions: inside the safety margin, mutually separated.
    const double inner = margin + max_disp;
    const double min_sep = std::max(14.0 * scale, 10.0);
    if (2.0 * inner + min_sep >= std::min(h, w))
        throw DataError("generate_synthetic: " + std::to_string(cfg.num_landmarks) +
                        " landmarks are not representable inside the image margin");
    std::vector<Point> centers;
    for (int k = 0; k < cfg.num_landmarks; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < 4000 && !placed; ++attempt) {
            Point c{rng.uniform(inner, w - 1.0 - inner), rng.uniform(inner, h - 1.0 - inner)};
            bool ok = true;
            for (const Point& o : centers) {
                if (std::hypot(c.x - o.x, c.y - o.y) < min_sep) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                centers.push_back(c);
                placed = true;
            }
        }
        if (!placed)
            throw DataError("generate_synthetic: could not place landmark " + std::to_string(k) +
                            " inside the image margin");
    }

    auto make_blob = [&](Point c, double jitter) {
        Blob b;
        b.center = c;
        b.amp_dot = rng.uniform(0.45, 0.60) * (1.0 + jitter * rng.uniform(-0.1, 0.1));
        b.sigma_dot = rng.uniform(2.0, 2.8) * scale;
        b.amp_ring = rng.uniform(0.22, 0.32);
        b.ring_r = rng.uniform(5.0, 7.0) * scale;
        b.sigma_ring = rng.uniform(1.6, 2.4) * scale;
        return b;
    };

    for (const Point& c : centers) a.blobs.push_back(make_blob(c, 0.0));

    // Distractor blobs from the same family, away from the true landmarks.
    const int n_distractors = cfg.num_landmarks;
    const double guard = 18.0 * scale;
    for (int k = 0; k < n_distractors; ++k) {
        for (int attempt = 0; attempt < 4000; ++attempt) {
            Point c{rng.uniform(0.08 * w, 0.92 * w), rng.uniform(0.08 * h, 0.92 * h)};
            bool ok = true;
            for (int i = 0; i < int(a.blobs.size()); ++i) {
                const double d = std::hypot(c.x - a.blobs[std::size_t(i)].center.x,
                                            c.y - a.blobs[std::size_t(i)].center.y);
                if (d < (i < cfg.num_landmarks ? guard : min_sep)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                a.blobs.push_back(make_blob(c, 1.0));
                break;
            }
        }
    }
    return a;
}

void normalize_minmax(GridD& img) {
    double lo = img.v[0], hi = img.v[0];
    for (double v : img.v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& v : img.v) v = (v - lo) / span;
}

}  // namespace

DatasetSplit generate_synthetic(std::uint64_t seed, const SyntheticConfig& cfg) {
    if (cfg.count < 2) throw ConfigError("generate_synthetic: count must be >= 2");
    if (cfg.num_landmarks < 1) throw ConfigError("generate_synthetic: num_landmarks must be >= 1");
    if (cfg.size.h < 16 || cfg.size.w < 16)
        throw ConfigError("generate_synthetic: image size too small");
    const int test_count = cfg.test_count >= 0 ? cfg.test_count : cfg.count / 4;
    if (test_count > cfg.count - 2)
        throw ConfigError("generate_synthetic: test_count leaves no unlabeled samples");
    const double mins = std::min(cfg.size.h, cfg.size.w);
    const double margin = cfg.margin >= 0.0 ? cfg.margin : mins / 4.0;
    const double max_disp = cfg.max_displacement >= 0.0 ? cfg.max_displacement : 8.0 * mins / 192.0;

    Rng anatomy_rng = Rng::substream(seed, "anatomy");
    const Anatomy anatomy = make_anatomy(anatomy_rng, cfg, margin, max_disp);

    GridD base(cfg.size.h, cfg.size.w);
    for (int y = 0; y < cfg.size.h; ++y)
        for (int x = 0; x < cfg.size.w; ++x) base(y, x) = anatomy.eval({double(x), double(y)});
    normalize_minmax(base);

    std::vector<Point> base_landmarks;
    for (int k = 0; k < cfg.num_landmarks; ++k)
        base_landmarks.push_back(anatomy.blobs[std::size_t(k)].center);

    std::vector<ImageSample> samples;
    samples.reserve(std::size_t(cfg.count));
    for (int j = 0; j < cfg.count; ++j) {
        ImageSample s;
        s.id = "synth_" + std::to_string(j);
        s.native_size = cfg.size;
        s.spacing_x = cfg.spacing_mm;
        s.spacing_y = cfg.spacing_mm;
        if (j == 0) {
            // The template is the pristine anatomy.
            s.pixels = base;
            s.landmarks = base_landmarks;
        } else {
            Rng warp_rng = Rng::substream(seed, "warp", std::uint64_t(j));
            const DisplacementField field = make_field(warp_rng, max_disp, cfg.size);
            GridD img(cfg.size.h, cfg.size.w);
            for (int y = 0; y < cfg.size.h; ++y)
                for (int x = 0; x < cfg.size.w; ++x) {
                    const Point src = field.invert({double(x), double(y)});
                    img(y, x) = sample_bilinear(base, src.x, src.y, Border::Clamp);
                }
            for (const Point& lm : base_landmarks) {
                const Point u = field.eval(lm);
                s.landmarks.push_back({lm.x + u.x, lm.y + u.y});
            }

            Rng photo_rng = Rng::substream(seed, "photo", std::uint64_t(j));
            const double gain = photo_rng.uniform(0.9, 1.1);
            const double bias = photo_rng.uniform(-0.05, 0.05);
            const double shade_amp = photo_rng.uniform(0.0, 0.08);
            const double shade_kx = photo_rng.uniform(0.3, 1.0);
            const double shade_ky = photo_rng.uniform(0.3, 1.0);
            const double shade_phase = photo_rng.uniform(0.0, 2.0 * kPi);
            for (int y = 0; y < cfg.size.h; ++y)
                for (int x = 0; x < cfg.size.w; ++x) {
                    double v = img(y, x) * gain + bias;
                    v *= 1.0 + shade_amp * std::cos(2.0 * kPi * (shade_kx * x / cfg.size.w +
                                                                 shade_ky * y / cfg.size.h) +
                                                    shade_phase);
                    v += cfg.noise_sigma * photo_rng.normal();
                    img(y, x) = v;
                }
            normalize_minmax(img);
            s.pixels = std::move(img);
        }
        samples.push_back(std::move(s));
    }

    DatasetSplit split;
    split.template_sample = std::move(samples[0]);
    for (int j = 1; j < cfg.count - test_count; ++j)
        split.unlabeled.push_back(std::move(samples[std::size_t(j)]));
    for (int j = cfg.count - test_count; j < cfg.count; ++j)
        split.test.push_back(std::move(samples[std::size_t(j)]));
    return split;
}

}  // namespace cc2d::data
