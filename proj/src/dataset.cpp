#include "shapdbm/dataset.hpp"

#include "shapdbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace shapdbm {

namespace {

std::uint32_t read_be_u32(std::istream& in) {
    std::uint8_t bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    return (static_cast<std::uint32_t>(bytes[0]) << 24) |
           (static_cast<std::uint32_t>(bytes[1]) << 16) |
           (static_cast<std::uint32_t>(bytes[2]) << 8) |
           static_cast<std::uint32_t>(bytes[3]);
}

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

void Dataset::validate() const {
    if (features.rows() != static_cast<Index>(labels.size())) {
        throw ConsistencyError("dataset: feature rows (" + std::to_string(features.rows()) +
                               ") != label count (" + std::to_string(labels.size()) + ")");
    }
    if (feature_count < 1 || features.cols() != feature_count) {
        throw ConsistencyError("dataset: feature_count mismatch");
    }
    if (class_count < 2) {
        throw ConsistencyError("dataset: class_count must be >= 2, got " +
                               std::to_string(class_count));
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= class_count) {
            throw ConsistencyError("dataset: label out of range at sample " + std::to_string(i));
        }
    }
    for (Index i = 0; i < features.rows(); ++i) {
        for (Index j = 0; j < features.cols(); ++j) {
            const double v = features(i, j);
            if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
                throw ConsistencyError("dataset: feature out of [0,1] at sample " +
                                       std::to_string(i) + ", feature " + std::to_string(j));
            }
        }
    }
}

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) {
        throw IoError("cannot open IDX image file: " + images_path.string());
    }
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) {
        throw IoError("cannot open IDX label file: " + labels_path.string());
    }

    const std::uint32_t image_magic = read_be_u32(images);
    if (!images || image_magic != kIdxImageMagic) {
        throw FormatError("bad IDX image magic in " + images_path.string());
    }
    const std::uint32_t image_count = read_be_u32(images);
    const std::uint32_t rows = read_be_u32(images);
    const std::uint32_t cols = read_be_u32(images);

    const std::uint32_t label_magic = read_be_u32(labels);
    if (!labels || label_magic != kIdxLabelMagic) {
        throw FormatError("bad IDX label magic in " + labels_path.string());
    }
    const std::uint32_t label_count = read_be_u32(labels);

    if (image_count != label_count) {
        throw ConsistencyError("IDX count mismatch: " + std::to_string(image_count) +
                               " images in " + images_path.string() + " vs " +
                               std::to_string(label_count) + " labels in " +
                               labels_path.string());
    }

    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    Dataset out;
    out.feature_count = static_cast<int>(pixels);
    out.features.resize(static_cast<Index>(image_count), static_cast<Index>(pixels));
    out.labels.resize(image_count);

    std::vector<std::uint8_t> buf(pixels);
    for (std::uint32_t i = 0; i < image_count; ++i) {
        images.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels));
        if (!images) {
            throw FormatError("truncated IDX image file: " + images_path.string());
        }
        for (std::size_t p = 0; p < pixels; ++p) {
            out.features(static_cast<Index>(i), static_cast<Index>(p)) = buf[p] / 255.0;
        }
    }

    std::vector<std::uint8_t> raw_labels(label_count);
    labels.read(reinterpret_cast<char*>(raw_labels.data()),
                static_cast<std::streamsize>(label_count));
    if (!labels) {
        throw FormatError("truncated IDX label file: " + labels_path.string());
    }
    int max_label = 0;
    for (std::uint32_t i = 0; i < label_count; ++i) {
        out.labels[i] = raw_labels[i];
        max_label = std::max(max_label, out.labels[i]);
    }
    out.class_count = std::max(2, max_label + 1);
    out.validate();
    return out;
}

Dataset load_csv(const std::filesystem::path& path, int label_column, bool header_row) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open CSV file: " + path.string());
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_number = 0;
    bool first_data_line = true;
    std::size_t column_count = 0;

    while (std::getline(in, line)) {
        ++line_number;
        if (header_row && line_number == 1) {
            continue;
        }
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t consumed = 0;
            double value = 0.0;
            try {
                value = std::stod(cell, &consumed);
            } catch (const std::exception&) {
                throw ParseError("non-numeric cell at row " + std::to_string(line_number) +
                                 " in " + path.string());
            }
            while (consumed < cell.size() &&
                   (cell[consumed] == ' ' || cell[consumed] == '\r')) {
                ++consumed;
            }
            if (consumed != cell.size() || !std::isfinite(value)) {
                throw ParseError("non-numeric cell at row " + std::to_string(line_number) +
                                 " in " + path.string());
            }
            row.push_back(value);
        }
        if (first_data_line) {
            column_count = row.size();
            first_data_line = false;
        } else if (row.size() != column_count) {
            throw ParseError("ragged row at row " + std::to_string(line_number) + " in " +
                             path.string());
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty() || column_count < 2) {
        throw FormatError("CSV needs at least one data row and two columns: " + path.string());
    }
    if (label_column < 0 || static_cast<std::size_t>(label_column) >= column_count) {
        throw ArgumentError("label column " + std::to_string(label_column) +
                            " out of range for " + std::to_string(column_count) + " columns");
    }

    const Index n_samples = static_cast<Index>(rows.size());
    const Index n_features = static_cast<Index>(column_count - 1);

    // Labels must be integer-valued; distinct values map to 0..C-1.
    std::map<long long, int> relabel;
    std::vector<long long> raw_labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double v = rows[i][static_cast<std::size_t>(label_column)];
        const long long rounded = std::llround(v);
        if (std::abs(v - static_cast<double>(rounded)) > 1e-9) {
            throw ParseError("non-integer label at row " +
                             std::to_string(i + 1 + (header_row ? 1 : 0)) + " in " +
                             path.string());
        }
        raw_labels[i] = rounded;
        relabel.emplace(rounded, 0);
    }
    int next_id = 0;
    for (auto& [value, id] : relabel) {
        id = next_id++;
    }

    Dataset out;
    out.feature_count = static_cast<int>(n_features);
    out.class_count = std::max(2, next_id);
    out.features.resize(n_samples, n_features);
    out.labels.resize(rows.size());

    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.labels[i] = relabel[raw_labels[i]];
        Index j = 0;
        for (std::size_t c = 0; c < column_count; ++c) {
            if (static_cast<int>(c) == label_column) {
                continue;
            }
            out.features(static_cast<Index>(i), j++) = rows[i][c];
        }
    }

    // Per-feature min-max normalization; constant columns map to 0.
    for (Index j = 0; j < n_features; ++j) {
        const double lo = out.features.col(j).minCoeff();
        const double hi = out.features.col(j).maxCoeff();
        if (hi > lo) {
            out.features.col(j) = (out.features.col(j).array() - lo) / (hi - lo);
        } else {
            out.features.col(j).setZero();
        }
    }

    out.validate();
    return out;
}

namespace {

void validate_spec(const SyntheticSpec& spec) {
    if (spec.samples_per_class < 1 || spec.feature_count < 1 || spec.class_count < 2) {
        throw ArgumentError("synthetic spec: counts must be positive and class_count >= 2");
    }
    if (spec.noise < 0.0) {
        throw ArgumentError("synthetic spec: noise must be >= 0");
    }
    switch (spec.kind) {
        case SyntheticKind::Moons:
            if (spec.class_count != 2) {
                throw ArgumentError("moons generator requires class_count = 2");
            }
            if (spec.feature_count < 2) {
                throw ArgumentError("moons generator requires feature_count >= 2");
            }
            break;
        case SyntheticKind::Confounded: {
            if (spec.nuisance_count < 1 || spec.nuisance_count >= spec.feature_count) {
                throw ArgumentError("confounded generator: 1 <= nuisance_count < feature_count");
            }
            const double band = kConfoundedInformativeSpan / spec.class_count;
            if (spec.noise >= 0.5 * band) {
                throw ArgumentError("confounded generator: noise must stay below half a class band");
            }
            break;
        }
        case SyntheticKind::Blobs:
            break;
    }
}

Dataset make_blobs(const SyntheticSpec& spec) {
    Rng rng(spec.seed);
    const int n = spec.feature_count;
    const int C = spec.class_count;

    // Centers drawn uniformly, re-drawn when two land too close together.
    Matrix centers(C, n);
    const double min_dist = 0.35 * std::sqrt(static_cast<double>(n));
    for (int c = 0; c < C; ++c) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            for (int j = 0; j < n; ++j) {
                centers(c, j) = rng.uniform(0.1, 0.9);
            }
            bool ok = true;
            for (int prev = 0; prev < c; ++prev) {
                if ((centers.row(c) - centers.row(prev)).norm() < min_dist) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                break;
            }
        }
    }

    Dataset out;
    out.feature_count = n;
    out.class_count = C;
    const Index total = static_cast<Index>(C) * spec.samples_per_class;
    out.features.resize(total, n);
    out.labels.resize(static_cast<std::size_t>(total));

    Index row = 0;
    for (int c = 0; c < C; ++c) {
        for (int s = 0; s < spec.samples_per_class; ++s, ++row) {
            out.labels[static_cast<std::size_t>(row)] = c;
            for (int j = 0; j < n; ++j) {
                out.features(row, j) = clamp01(centers(c, j) + spec.noise * rng.normal());
            }
        }
    }
    return out;
}

Dataset make_moons(const SyntheticSpec& spec) {
    Rng rng(spec.seed);
    const int n = spec.feature_count;

    Dataset out;
    out.feature_count = n;
    out.class_count = 2;
    const Index total = 2 * static_cast<Index>(spec.samples_per_class);
    out.features.resize(total, n);
    out.labels.resize(static_cast<std::size_t>(total));

    const double pi = 3.14159265358979323846;
    Index row = 0;
    for (int c = 0; c < 2; ++c) {
        for (int s = 0; s < spec.samples_per_class; ++s, ++row) {
            out.labels[static_cast<std::size_t>(row)] = c;
            const double t = pi * (spec.samples_per_class > 1
                                       ? static_cast<double>(s) / (spec.samples_per_class - 1)
                                       : 0.5);
            double x, y;
            if (c == 0) {
                x = std::cos(t);
                y = std::sin(t);
            } else {
                x = 1.0 - std::cos(t);
                y = 0.5 - std::sin(t);
            }
            // Raw interleaved half-circles span [-1,2] x [-0.5,1]; map into
            // the unit square with a small border.
            x = 0.05 + 0.9 * (x + 1.0) / 3.0;
            y = 0.05 + 0.9 * (y + 0.5) / 1.5;
            out.features(row, 0) = clamp01(x + spec.noise * rng.normal());
            out.features(row, 1) = clamp01(y + spec.noise * rng.normal());
            for (int j = 2; j < n; ++j) {
                out.features(row, j) = clamp01(0.5 + spec.noise * rng.normal());
            }
        }
    }
    return out;
}

Dataset make_confounded(const SyntheticSpec& spec) {
    Rng rng(spec.seed);
    const int n = spec.feature_count;
    const int C = spec.class_count;
    const int informative = n - spec.nuisance_count;

    // Class bands along the mean of the informative features, separated by a
    // guaranteed margin so the label is recomputable from those features.
    // The informative span is deliberately narrow: the nuisance features must
    // carry at least 4x the informative variance for the confounding effect.
    const double span_lo = kConfoundedInformativeLow;
    const double band = kConfoundedInformativeSpan / C;
    const double margin = std::max(spec.noise, 0.15 * band);

    // Nuisance cluster centers: evenly spaced levels, permuted per feature,
    // with the cluster assignment independent of the class label.
    const int nuisance_clusters = 4;
    Matrix nuisance_centers(nuisance_clusters, spec.nuisance_count);
    for (int j = 0; j < spec.nuisance_count; ++j) {
        std::vector<int> order = rng.permutation(nuisance_clusters);
        for (int k = 0; k < nuisance_clusters; ++k) {
            nuisance_centers(k, j) = 0.1 + 0.8 * order[static_cast<std::size_t>(k)] /
                                               (nuisance_clusters - 1);
        }
    }

    Dataset out;
    out.feature_count = n;
    out.class_count = C;
    const Index total = static_cast<Index>(C) * spec.samples_per_class;
    out.features.resize(total, n);
    out.labels.resize(static_cast<std::size_t>(total));

    Index row = 0;
    for (int c = 0; c < C; ++c) {
        const double lo = span_lo + c * band + margin;
        const double hi = span_lo + (c + 1) * band - margin;
        for (int s = 0; s < spec.samples_per_class; ++s, ++row) {
            out.labels[static_cast<std::size_t>(row)] = c;

            const double u = rng.uniform(lo, hi);
            // Zero-mean jitter keeps the informative mean exactly at u while
            // every informative feature stays inside the class band.
            const double amp =
                std::min({spec.noise, u - (span_lo + c * band), span_lo + (c + 1) * band - u});
            std::vector<double> jitter(static_cast<std::size_t>(informative));
            double jitter_mean = 0.0;
            for (int j = 0; j < informative; ++j) {
                jitter[static_cast<std::size_t>(j)] = rng.uniform(-amp * 0.5, amp * 0.5);
                jitter_mean += jitter[static_cast<std::size_t>(j)];
            }
            jitter_mean /= informative;
            for (int j = 0; j < informative; ++j) {
                out.features(row, j) = u + jitter[static_cast<std::size_t>(j)] - jitter_mean;
            }

            const int cluster = static_cast<int>(rng.uniform_int(nuisance_clusters));
            for (int j = 0; j < spec.nuisance_count; ++j) {
                out.features(row, informative + j) =
                    clamp01(nuisance_centers(cluster, j) + 0.03 * rng.normal());
            }
        }
    }
    return out;
}

}  // namespace

int confounded_label_rule(const Eigen::Ref<const Vector>& features, int informative_count,
                          int class_count) {
    double mean = 0.0;
    for (int j = 0; j < informative_count; ++j) {
        mean += features(j);
    }
    mean /= informative_count;
    const double t = (mean - kConfoundedInformativeLow) / kConfoundedInformativeSpan;
    int c = static_cast<int>(t * class_count);
    return std::min(std::max(c, 0), class_count - 1);
}

Dataset make_synthetic(const SyntheticSpec& spec) {
    validate_spec(spec);
    Dataset out;
    switch (spec.kind) {
        case SyntheticKind::Blobs:
            out = make_blobs(spec);
            break;
        case SyntheticKind::Moons:
            out = make_moons(spec);
            break;
        case SyntheticKind::Confounded:
            out = make_confounded(spec);
            break;
    }
    out.validate();
    return out;
}

SplitPair split(const Dataset& data, double test_fraction, std::uint64_t seed) {
    data.validate();
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ArgumentError("test_fraction must lie in (0,1)");
    }
    const Index total = data.sample_count();
    if (static_cast<double>(total) * test_fraction < 1.0 ||
        static_cast<double>(total) * (1.0 - test_fraction) < 1.0) {
        throw ArgumentError("split would leave an empty half");
    }

    std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(data.class_count));
    for (Index i = 0; i < total; ++i) {
        by_class[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])].push_back(i);
    }

    Rng rng(seed);
    std::vector<bool> in_test(static_cast<std::size_t>(total), false);
    for (int c = 0; c < data.class_count; ++c) {
        auto& members = by_class[static_cast<std::size_t>(c)];
        if (members.empty()) {
            continue;
        }
        if (members.size() < 2) {
            throw ArgumentError("stratified split: class " + std::to_string(c) +
                                " has fewer than 2 samples");
        }
        rng.shuffle(members);
        const auto count = static_cast<std::size_t>(members.size());
        auto take = static_cast<std::size_t>(
            std::llround(static_cast<double>(count) * test_fraction));
        take = std::min(std::max<std::size_t>(take, 1), count - 1);
        for (std::size_t k = 0; k < take; ++k) {
            in_test[static_cast<std::size_t>(members[k])] = true;
        }
    }

    // Both halves keep the original sample order.
    std::vector<Index> train_idx, test_idx;
    for (Index i = 0; i < total; ++i) {
        (in_test[static_cast<std::size_t>(i)] ? test_idx : train_idx).push_back(i);
    }

    auto gather = [&](const std::vector<Index>& idx) {
        Dataset d;
        d.feature_count = data.feature_count;
        d.class_count = data.class_count;
        d.features.resize(static_cast<Index>(idx.size()), data.feature_count);
        d.labels.resize(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            d.features.row(static_cast<Index>(k)) = data.features.row(idx[k]);
            d.labels[k] = data.labels[static_cast<std::size_t>(idx[k])];
        }
        return d;
    };

    SplitPair pair{gather(train_idx), gather(test_idx)};
    pair.train.validate();
    pair.test.validate();
    return pair;
}

}  // namespace shapdbm
