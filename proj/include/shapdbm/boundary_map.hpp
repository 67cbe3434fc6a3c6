#pragma once

#include "shapdbm/classifier.hpp"
#include "shapdbm/inverse_projection.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace shapdbm {

struct GridSpec {
    int resolution = 500;        // pixels per side (r)
    int locations_per_pixel = 1; // samples per pixel (l)
    Bounds bounds;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Continuous sample locations, locations_per_pixel per cell.  Pixel (row i,
/// col j) covers the half-open cell with row 0 at the top (ymax side);
/// location k of that pixel sits at row (i * r + j) * l + k.
struct SampleGrid {
    GridSpec spec;
    Matrix locations;  // (r*r*l) x 2

    Index location_index(int row, int col, int k) const {
        return (static_cast<Index>(row) * spec.resolution + col) * spec.locations_per_pixel + k;
    }
};

/// The decision boundary map: majority class and its vote share per pixel.
struct DecisionMap {
    GridSpec grid;
    int class_count = 0;
    std::vector<int> labels;          // r*r, row-major from the top row
    std::vector<double> confidence;   // r*r, majority count / l

    int label_at(int row, int col) const {
        return labels[static_cast<std::size_t>(row) * grid.resolution + col];
    }
    double confidence_at(int row, int col) const {
        return confidence[static_cast<std::size_t>(row) * grid.resolution + col];
    }
};

/// Uniform per-pixel sample locations; each pixel draws from its own
/// generator seeded by (seed, row, col), so the result is independent of
/// traversal order.
SampleGrid build_grid(const Bounds& bounds, int resolution, int locations_per_pixel,
                      std::uint64_t seed);

/// Pushes every grid location through the inverse projection and the
/// classifier, then votes per pixel (ties toward the lowest class index).
DecisionMap render_map(const SampleGrid& grid, const InverseModel& inverse,
                       const NetworkModel& model, int threads = 0);

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
};

/// The 10 categorical palette colors used by the map figures.
const std::vector<Rgb>& default_palette();

/// Binary PPM (P6) encoding; confidence is remapped into [0.5, 1] and blended
/// against white, so the bytes are a pure function of the map and palette.
std::vector<std::uint8_t> encode_image(const DecisionMap& map, const std::vector<Rgb>& palette);

/// Draws embedding points over an encoded map image as 3x3 class-colored
/// squares with a 1 px black outline, in index order.
std::vector<std::uint8_t> overlay_scatter(const std::vector<std::uint8_t>& image,
                                          const GridSpec& grid, const Embedding& embedding,
                                          const std::vector<int>& labels,
                                          const std::vector<Rgb>& palette);

/// Grayscale PPM strip of original (top) and reconstructed (bottom) samples,
/// for image-shaped data with side*side features.
std::vector<std::uint8_t> encode_sample_strip(const Matrix& originals,
                                              const Matrix& reconstructions, int side);

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace shapdbm
