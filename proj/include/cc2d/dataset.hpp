#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cc2d/common.hpp"
#include "cc2d/grid.hpp"

namespace cc2d::data {

// One grayscale image with ordered landmark annotations. Pixels and landmark
// coordinates live in the resized working space; native_size and spacing_mm
// are retained so metric errors can be computed in native millimeters.
struct ImageSample {
    std::string id;
    GridD pixels;                  // H x W, intensities in [0, 1]
    std::vector<Point> landmarks;  // resized space, sub-pixel
    SizeHW native_size;
    double spacing_x = 1.0;  // mm per native pixel
    double spacing_y = 1.0;

    SizeHW size() const { return {pixels.h, pixels.w}; }
};

struct DatasetSplit {
    ImageSample template_sample;          // the one trusted annotation
    std::vector<ImageSample> unlabeled;   // landmarks used only for evaluation
    std::vector<ImageSample> test;

    int num_landmarks() const { return int(template_sample.landmarks.size()); }
};

Point rescale_point(Point p, SizeHW from, SizeHW to);
std::vector<Point> rescale_coords(const std::vector<Point>& points, SizeHW from, SizeHW to);

// Annotation files: one "x y" pair per line, native pixel coordinates,
// decimals allowed; line order defines the landmark index.
std::vector<Point> read_annotation(const std::filesystem::path& file);
void write_annotation(const std::filesystem::path& file, const std::vector<Point>& points);

// 8- or 16-bit grayscale PNG, min-max normalized to [0, 1].
GridD read_image_png(const std::filesystem::path& file);
void write_image_png16(const std::filesystem::path& file, const GridD& image);
void write_image_png8(const std::filesystem::path& file, const GridD& image);

// Loads `images/<id>.png`, `annotations/<id>.txt` and `meta.json` from a
// dataset directory, resizing images to target_size and rescaling landmarks
// analytically.
DatasetSplit load_dataset(const std::filesystem::path& root, SizeHW target_size);

// Writes a split in the same directory layout (16-bit PNGs, annotations in
// native coordinates, meta.json with spacing and split membership).
void save_dataset(const std::filesystem::path& root, const DatasetSplit& split);

}  // namespace cc2d::data
