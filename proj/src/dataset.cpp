#include "cc2d/dataset.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cc2d::data {

namespace fs = std::filesystem;
using nlohmann::json;

Point rescale_point(Point p, SizeHW from, SizeHW to) {
    if (from.h <= 0 || from.w <= 0 || to.h <= 0 || to.w <= 0)
        throw DataError("rescale_point: sizes must be positive");
    return {p.x * double(to.w) / double(from.w), p.y * double(to.h) / double(from.h)};
}

std::vector<Point> rescale_coords(const std::vector<Point>& points, SizeHW from, SizeHW to) {
    std::vector<Point> out;
    out.reserve(points.size());
    for (const Point& p : points) out.push_back(rescale_point(p, from, to));
    return out;
}

std::vector<Point> read_annotation(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open annotation file " + file.string());
    std::vector<Point> points;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        Point p;
        if (!(ss >> p.x >> p.y))
            throw DataError("malformed annotation at " + file.string() + ":" + std::to_string(lineno));
        points.push_back(p);
    }
    return points;
}

void write_annotation(const fs::path& file, const std::vector<Point>& points) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write annotation file " + file.string());
    out.precision(17);
    for (const Point& p : points) out << p.x << " " << p.y << "\n";
}

GridD read_image_png(const fs::path& file) {
    cv::Mat raw = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
    if (raw.empty()) throw IoError("cannot read image " + file.string());
    if (raw.channels() == 3 || raw.channels() == 4) {
        cv::Mat gray;
        cv::Mat channels[4];
        cv::split(raw, channels);
        raw = channels[0];  // layout contract is grayscale; take the first plane
    }
    cv::Mat asDouble;
    raw.convertTo(asDouble, CV_64F);
    GridD img(raw.rows, raw.cols);
    double lo = asDouble.at<double>(0, 0), hi = lo;
    for (int y = 0; y < raw.rows; ++y)
        for (int x = 0; x < raw.cols; ++x) {
            const double v = asDouble.at<double>(y, x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double span = hi > lo ? hi - lo : 1.0;
    for (int y = 0; y < raw.rows; ++y)
        for (int x = 0; x < raw.cols; ++x) img(y, x) = (asDouble.at<double>(y, x) - lo) / span;
    return img;
}

namespace {

void write_png_impl(const fs::path& file, const GridD& image, int bits) {
    cv::Mat mat(image.h, image.w, bits == 16 ? CV_16U : CV_8U);
    const double scale = bits == 16 ? 65535.0 : 255.0;
    for (int y = 0; y < image.h; ++y)
        for (int x = 0; x < image.w; ++x) {
            const double v = std::clamp(image(y, x), 0.0, 1.0) * scale;
            if (bits == 16)
                mat.at<std::uint16_t>(y, x) = std::uint16_t(std::lround(v));
            else
                mat.at<std::uint8_t>(y, x) = std::uint8_t(std::lround(v));
        }
    if (!cv::imwrite(file.string(), mat)) throw IoError("cannot write image " + file.string());
}

struct MetaInfo {
    std::map<std::string, std::pair<double, double>> spacing;
    std::string template_id;
    std::vector<std::string> unlabeled;
    std::vector<std::string> test;
};

MetaInfo read_meta(const fs::path& root) {
    const fs::path file = root / "meta.json";
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("malformed meta.json at " + file.string() + ": " + e.what());
    }
    MetaInfo meta;
    if (!j.contains("images") || !j.contains("template"))
        throw DataError(file.string() + " must contain \"images\" and \"template\"");
    for (auto& [id, entry] : j.at("images").items()) {
        const auto sp = entry.at("spacing_mm");
        meta.spacing[id] = {sp.at(0).get<double>(), sp.at(1).get<double>()};
    }
    meta.template_id = j.at("template").get<std::string>();
    if (j.contains("unlabeled")) meta.unlabeled = j.at("unlabeled").get<std::vector<std::string>>();
    if (j.contains("test")) meta.test = j.at("test").get<std::vector<std::string>>();
    return meta;
}

ImageSample load_sample(const fs::path& root, const std::string& id,
                        std::pair<double, double> spacing, SizeHW target, int expected_landmarks) {
    const fs::path image_file = root / "images" / (id + ".png");
    const fs::path ann_file = root / "annotations" / (id + ".txt");
    GridD native = read_image_png(image_file);
    std::vector<Point> landmarks = read_annotation(ann_file);
    if (expected_landmarks >= 0 && int(landmarks.size()) != expected_landmarks)
        throw DataError("annotation count mismatch in " + ann_file.string() + ": expected " +
                        std::to_string(expected_landmarks) + ", got " +
                        std::to_string(landmarks.size()));
    if (spacing.first <= 0.0 || spacing.second <= 0.0)
        throw DataError("non-positive spacing_mm for image id " + id);

    ImageSample sample;
    sample.id = id;
    sample.native_size = {native.h, native.w};
    sample.spacing_x = spacing.first;
    sample.spacing_y = spacing.second;
    sample.pixels = (native.h == target.h && native.w == target.w)
                        ? std::move(native)
                        : resize_bilinear(native, target.h, target.w);
    sample.landmarks = rescale_coords(landmarks, sample.native_size, target);
    for (const Point& p : sample.landmarks) {
        if (p.x < 0.0 || p.x >= target.w || p.y < 0.0 || p.y >= target.h)
            throw DataError("landmark out of bounds in " + ann_file.string());
    }
    return sample;
}

}  // namespace

void write_image_png16(const fs::path& file, const GridD& image) { write_png_impl(file, image, 16); }
void write_image_png8(const fs::path& file, const GridD& image) { write_png_impl(file, image, 8); }

DatasetSplit load_dataset(const fs::path& root, SizeHW target_size) {
    if (target_size.h <= 0 || target_size.w <= 0)
        throw ConfigError("load_dataset: target size must be positive");
    const MetaInfo meta = read_meta(root);

    auto spacing_of = [&](const std::string& id) {
        auto it = meta.spacing.find(id);
        if (it == meta.spacing.end())
            throw DataError("meta.json has no spacing_mm entry for image id " + id);
        return it->second;
    };

    DatasetSplit split;
    split.template_sample =
        load_sample(root, meta.template_id, spacing_of(meta.template_id), target_size, -1);
    const int k = int(split.template_sample.landmarks.size());
    if (k < 1) throw DataError("template annotation is empty for id " + meta.template_id);
    for (const std::string& id : meta.unlabeled) {
        if (id == meta.template_id)
            throw DataError("template id " + id + " also listed in the unlabeled split");
        split.unlabeled.push_back(load_sample(root, id, spacing_of(id), target_size, k));
    }
    for (const std::string& id : meta.test) {
        if (id == meta.template_id)
            throw DataError("template id " + id + " also listed in the test split");
        split.test.push_back(load_sample(root, id, spacing_of(id), target_size, k));
    }
    return split;
}

void save_dataset(const fs::path& root, const DatasetSplit& split) {
    fs::create_directories(root / "images");
    fs::create_directories(root / "annotations");

    json meta;
    meta["template"] = split.template_sample.id;
    meta["unlabeled"] = json::array();
    meta["test"] = json::array();
    meta["images"] = json::object();

    auto save_one = [&](const ImageSample& s) {
        if (s.pixels.h != s.native_size.h || s.pixels.w != s.native_size.w)
            throw DataError("save_dataset expects samples in native resolution");
        write_image_png16(root / "images" / (s.id + ".png"), s.pixels);
        write_annotation(root / "annotations" / (s.id + ".txt"), s.landmarks);
        meta["images"][s.id] = {{"spacing_mm", {s.spacing_x, s.spacing_y}}};
    };

    save_one(split.template_sample);
    for (const auto& s : split.unlabeled) {
        save_one(s);
        meta["unlabeled"].push_back(s.id);
    }
    for (const auto& s : split.test) {
        save_one(s);
        meta["test"].push_back(s.id);
    }

    std::ofstream out(root / "meta.json");
    if (!out) throw IoError("cannot write " + (root / "meta.json").string());
    out << meta.dump(2) << "\n";
}

}  // namespace cc2d::data
