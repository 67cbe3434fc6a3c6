#include "shapdbm/boundary_map.hpp"

#include "shapdbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#ifdef SHAPDBM_HAVE_OPENMP
#include <omp.h>
#endif

namespace shapdbm {

void GridSpec::validate() const {
    if (resolution < 2) {
        throw ArgumentError("grid resolution must be >= 2");
    }
    if (locations_per_pixel < 1) {
        throw ArgumentError("locations per pixel must be >= 1");
    }
    if (bounds.degenerate()) {
        throw ArgumentError("grid bounds are degenerate");
    }
}

SampleGrid build_grid(const Bounds& bounds, int resolution, int locations_per_pixel,
                      std::uint64_t seed) {
    SampleGrid grid;
    grid.spec.resolution = resolution;
    grid.spec.locations_per_pixel = locations_per_pixel;
    grid.spec.bounds = bounds;
    grid.spec.seed = seed;
    grid.spec.validate();

    const int r = resolution;
    const int l = locations_per_pixel;
    const double cell_w = bounds.width() / r;
    const double cell_h = bounds.height() / r;

    grid.locations.resize(static_cast<Index>(r) * r * l, 2);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            // Per-pixel generator: the draw for a pixel is the same no matter
            // which order (or thread) visits it.
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i),
                                static_cast<std::uint64_t>(j)));
            for (int k = 0; k < l; ++k) {
                const Index row = grid.location_index(i, j, k);
                // uniform_open keeps locations strictly inside the cell
                grid.locations(row, 0) = bounds.xmin + (j + rng.uniform_open()) * cell_w;
                grid.locations(row, 1) = bounds.ymax - (i + rng.uniform_open()) * cell_h;
            }
        }
    }
    return grid;
}

DecisionMap render_map(const SampleGrid& grid, const InverseModel& inverse,
                       const NetworkModel& model, int threads) {
    grid.spec.validate();
    if (inverse.output_width() != model.net.shape().input_width()) {
        throw ArgumentError("inverse output width " + std::to_string(inverse.output_width()) +
                            " != classifier input width " +
                            std::to_string(model.net.shape().input_width()));
    }

    const int r = grid.spec.resolution;
    const int l = grid.spec.locations_per_pixel;
    const Index total = grid.locations.rows();
    std::vector<int> location_classes(static_cast<std::size_t>(total));

    // Chunks are independent; the outputs land in disjoint slices, so the
    // map is identical for any worker count.
    const Index chunk = 8192;
    const Index n_chunks = (total + chunk - 1) / chunk;
#ifdef SHAPDBM_HAVE_OPENMP
    const int n_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(n_threads)
#else
    (void)threads;
#endif
    for (Index c = 0; c < n_chunks; ++c) {
        const Index start = c * chunk;
        const Index count = std::min(chunk, total - start);
        const Matrix samples = invert(inverse, grid.locations.middleRows(start, count));
        const std::vector<int> classes = predict_classes(model, samples);
        std::copy(classes.begin(), classes.end(),
                  location_classes.begin() + static_cast<std::ptrdiff_t>(start));
    }

    const int class_count = model.net.shape().output_width();
    DecisionMap map;
    map.grid = grid.spec;
    map.class_count = class_count;
    map.labels.resize(static_cast<std::size_t>(r) * r);
    map.confidence.resize(static_cast<std::size_t>(r) * r);

    std::vector<int> votes(static_cast<std::size_t>(class_count));
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            std::fill(votes.begin(), votes.end(), 0);
            for (int k = 0; k < l; ++k) {
                votes[static_cast<std::size_t>(
                    location_classes[static_cast<std::size_t>(grid.location_index(i, j, k))])]++;
            }
            int best = 0;
            for (int c = 1; c < class_count; ++c) {
                if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) {
                    best = c;
                }
            }
            const std::size_t p = static_cast<std::size_t>(i) * r + j;
            map.labels[p] = best;
            map.confidence[p] =
                static_cast<double>(votes[static_cast<std::size_t>(best)]) / l;
        }
    }
    return map;
}

const std::vector<Rgb>& default_palette() {
    static const std::vector<Rgb> palette = {
        {31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},  {148, 103, 189},
        {140, 86, 75},  {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207}};
    return palette;
}

namespace {

std::string ppm_header(int width, int height) {
    return "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
}

std::uint8_t blend_channel(std::uint8_t color, double weight) {
    // weight toward the palette color, remainder toward white; half-up
    const double v = color * weight + 255.0 * (1.0 - weight);
    return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

}  // namespace

std::vector<std::uint8_t> encode_image(const DecisionMap& map, const std::vector<Rgb>& palette) {
    if (static_cast<int>(palette.size()) < map.class_count) {
        throw ArgumentError("palette has " + std::to_string(palette.size()) +
                            " colors but the map has " + std::to_string(map.class_count) +
                            " classes");
    }
    const int r = map.grid.resolution;
    const std::string header = ppm_header(r, r);

    std::vector<std::uint8_t> bytes;
    bytes.reserve(header.size() + static_cast<std::size_t>(r) * r * 3);
    bytes.insert(bytes.end(), header.begin(), header.end());

    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            const std::size_t p = static_cast<std::size_t>(i) * r + j;
            const Rgb& color = palette[static_cast<std::size_t>(map.labels[p])];
            // Low-confidence pixels fade toward white but stay readable.
            const double weight = 0.5 + 0.5 * map.confidence[p];
            bytes.push_back(blend_channel(color.r, weight));
            bytes.push_back(blend_channel(color.g, weight));
            bytes.push_back(blend_channel(color.b, weight));
        }
    }
    return bytes;
}

namespace {

struct PixelIndex {
    int row = 0;
    int col = 0;
};

/// Cell containing a coordinate; points on the max edges belong to the last
/// cell, row 0 sits at the top (ymax side).
PixelIndex pixel_of(const Bounds& bounds, int resolution, double x, double y) {
    const double fx = (x - bounds.xmin) / bounds.width();
    const double fy = (bounds.ymax - y) / bounds.height();
    int col = static_cast<int>(fx * resolution);
    int row = static_cast<int>(fy * resolution);
    col = std::clamp(col, 0, resolution - 1);
    row = std::clamp(row, 0, resolution - 1);
    return {row, col};
}

}  // namespace

std::vector<std::uint8_t> overlay_scatter(const std::vector<std::uint8_t>& image,
                                          const GridSpec& grid, const Embedding& embedding,
                                          const std::vector<int>& labels,
                                          const std::vector<Rgb>& palette) {
    const int r = grid.resolution;
    const std::string header = ppm_header(r, r);
    if (image.size() != header.size() + static_cast<std::size_t>(r) * r * 3 ||
        !std::equal(header.begin(), header.end(), image.begin())) {
        throw ArgumentError("overlay_scatter: image does not match the grid's PPM layout");
    }
    if (embedding.size() != static_cast<Index>(labels.size())) {
        throw ArgumentError("overlay_scatter: embedding and label sizes differ");
    }
    if (embedding.size() > 0 && !grid.bounds.contains(embedding.bounds)) {
        throw ArgumentError("overlay_scatter: embedding bounds exceed grid bounds");
    }

    std::vector<std::uint8_t> out = image;
    const std::size_t offset = header.size();
    auto paint = [&](int row, int col, const Rgb& color) {
        if (row < 0 || row >= r || col < 0 || col >= r) {
            return;
        }
        const std::size_t p = offset + (static_cast<std::size_t>(row) * r + col) * 3;
        out[p] = color.r;
        out[p + 1] = color.g;
        out[p + 2] = color.b;
    };

    for (Index s = 0; s < embedding.size(); ++s) {
        const auto [row, col] = pixel_of(grid.bounds, r, embedding.coords(s, 0),
                                         embedding.coords(s, 1));
        const Rgb& color = palette[static_cast<std::size_t>(
            labels[static_cast<std::size_t>(s)] % static_cast<int>(palette.size()))];
        for (int di = -2; di <= 2; ++di) {
            for (int dj = -2; dj <= 2; ++dj) {
                paint(row + di, col + dj, Rgb{0, 0, 0});
            }
        }
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                paint(row + di, col + dj, color);
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_sample_strip(const Matrix& originals,
                                              const Matrix& reconstructions, int side) {
    if (originals.rows() != reconstructions.rows() ||
        originals.cols() != reconstructions.cols()) {
        throw ArgumentError("sample strip: original and reconstruction shapes differ");
    }
    if (side < 1 || static_cast<Index>(side) * side != originals.cols()) {
        throw ArgumentError("sample strip: features are not side x side images");
    }
    const int k = static_cast<int>(originals.rows());
    const int width = k * side;
    const int height = 2 * side;
    const std::string header = ppm_header(width, height);

    std::vector<std::uint8_t> bytes;
    bytes.reserve(header.size() + static_cast<std::size_t>(width) * height * 3);
    bytes.insert(bytes.end(), header.begin(), header.end());

    auto gray = [](double v) {
        const double c = std::clamp(v, 0.0, 1.0) * 255.0;
        return static_cast<std::uint8_t>(std::floor(c + 0.5));
    };
    for (int half = 0; half < 2; ++half) {
        const Matrix& source = (half == 0) ? originals : reconstructions;
        for (int y = 0; y < side; ++y) {
            for (int s = 0; s < k; ++s) {
                for (int x = 0; x < side; ++x) {
                    const std::uint8_t g =
                        gray(source(s, static_cast<Index>(y) * side + x));
                    bytes.push_back(g);
                    bytes.push_back(g);
                    bytes.push_back(g);
                }
            }
        }
    }
    return bytes;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

}  // namespace shapdbm
