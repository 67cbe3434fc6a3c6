#include "shapdbm/map_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace shapdbm {

std::vector<PixelRef> locate_pixels(const Embedding& embedding, const GridSpec& grid) {
    grid.validate();
    const int r = grid.resolution;
    const Bounds& b = grid.bounds;

    std::vector<PixelRef> out(static_cast<std::size_t>(embedding.size()));
    for (Index s = 0; s < embedding.size(); ++s) {
        const double x = embedding.coords(s, 0);
        const double y = embedding.coords(s, 1);
        if (!b.contains(x, y)) {
            throw ArgumentError("sample " + std::to_string(s) + " lies outside the grid bounds");
        }
        int col = static_cast<int>((x - b.xmin) / b.width() * r);
        int row = static_cast<int>((b.ymax - y) / b.height() * r);
        // Max-edge points belong to the last cell.
        col = std::min(col, r - 1);
        row = std::min(row, r - 1);
        out[static_cast<std::size_t>(s)] = {row, col};
    }
    return out;
}

namespace {

void check_metric_inputs(const DecisionMap& map, const Embedding& embedding,
                         const std::vector<int>& predicted_labels) {
    if (embedding.size() == 0) {
        throw ArgumentError("map metrics need at least one sample");
    }
    if (embedding.size() != static_cast<Index>(predicted_labels.size())) {
        throw ArgumentError("embedding rows and predicted label count differ");
    }
    for (std::size_t i = 0; i < predicted_labels.size(); ++i) {
        if (predicted_labels[i] < 0 || predicted_labels[i] >= map.class_count) {
            throw ArgumentError("predicted label out of range at sample " + std::to_string(i));
        }
    }
}

}  // namespace

MapMetrics compute_map_metrics(const DecisionMap& map, const Embedding& embedding,
                               const std::vector<int>& predicted_labels) {
    check_metric_inputs(map, embedding, predicted_labels);
    const std::vector<PixelRef> pixels = locate_pixels(embedding, map.grid);
    const int C = map.class_count;

    // hits(c): samples predicted c sitting on pixels labelled c
    // on_pixel(c): samples on pixels labelled c           (MP denominator)
    // predicted(c): samples predicted c                   (MR denominator)
    std::vector<long> hits(static_cast<std::size_t>(C), 0);
    std::vector<long> on_pixel(static_cast<std::size_t>(C), 0);
    std::vector<long> predicted(static_cast<std::size_t>(C), 0);

    long correct = 0;
    for (std::size_t s = 0; s < pixels.size(); ++s) {
        const int pixel_label = map.label_at(pixels[s].row, pixels[s].col);
        const int sample_label = predicted_labels[s];
        on_pixel[static_cast<std::size_t>(pixel_label)]++;
        predicted[static_cast<std::size_t>(sample_label)]++;
        if (pixel_label == sample_label) {
            hits[static_cast<std::size_t>(sample_label)]++;
            ++correct;
        }
    }

    MapMetrics metrics;
    metrics.covered_samples = embedding.size();
    metrics.map_accuracy = static_cast<double>(correct) / static_cast<double>(embedding.size());
    metrics.map_precision.resize(C);
    metrics.map_recall.resize(C);
    metrics.precision_defaulted.assign(static_cast<std::size_t>(C), 0);
    metrics.recall_defaulted.assign(static_cast<std::size_t>(C), 0);

    for (int c = 0; c < C; ++c) {
        const auto uc = static_cast<std::size_t>(c);
        if (on_pixel[uc] == 0) {
            metrics.map_precision(c) = 1.0;
            metrics.precision_defaulted[uc] = 1;
        } else {
            metrics.map_precision(c) =
                static_cast<double>(hits[uc]) / static_cast<double>(on_pixel[uc]);
        }
        if (predicted[uc] == 0) {
            metrics.map_recall(c) = 1.0;
            metrics.recall_defaulted[uc] = 1;
        } else {
            metrics.map_recall(c) =
                static_cast<double>(hits[uc]) / static_cast<double>(predicted[uc]);
        }
    }
    return metrics;
}

MapMetrics map_accuracy(const DecisionMap& map, const Embedding& embedding,
                        const std::vector<int>& predicted_labels) {
    MapMetrics metrics = compute_map_metrics(map, embedding, predicted_labels);
    metrics.map_precision.resize(0);
    metrics.map_recall.resize(0);
    metrics.precision_defaulted.clear();
    metrics.recall_defaulted.clear();
    return metrics;
}

MapMetrics map_precision_recall(const DecisionMap& map, const Embedding& embedding,
                                const std::vector<int>& predicted_labels) {
    return compute_map_metrics(map, embedding, predicted_labels);
}

RoundTripReport roundtrip_report(const Embedding& embedding, const InverseModel& inverse,
                                 const Dataset& originals, const std::vector<Index>& indices) {
    originals.validate();
    if (embedding.size() != originals.sample_count()) {
        throw ArgumentError("embedding rows and original rows differ");
    }

    RoundTripReport report;
    report.indices = indices;
    report.originals.resize(static_cast<Index>(indices.size()), originals.feature_count);
    Matrix coords(static_cast<Index>(indices.size()), 2);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const Index i = indices[k];
        if (i < 0 || i >= originals.sample_count()) {
            throw ArgumentError("round trip index out of range: " + std::to_string(i));
        }
        report.originals.row(static_cast<Index>(k)) = originals.features.row(i);
        coords.row(static_cast<Index>(k)) = embedding.coords.row(i);
    }

    if (indices.empty()) {
        report.reconstructions.resize(0, originals.feature_count);
        report.squared_errors.resize(0);
        report.mean_error = std::nullopt;
        return report;
    }

    report.reconstructions = invert(inverse, coords);
    report.squared_errors =
        (report.reconstructions - report.originals).rowwise().squaredNorm();
    report.mean_error = report.squared_errors.mean();
    return report;
}

}  // namespace shapdbm
