#pragma once

#include "shapdbm/boundary_map.hpp"

#include <optional>
#include <vector>

namespace shapdbm {

/// Map quality scores against projected samples and their predicted labels.
struct MapMetrics {
    double map_accuracy = 0.0;
    Vector map_precision;  // per class
    Vector map_recall;     // per class
    std::vector<std::uint8_t> precision_defaulted;  // empty-denominator flags
    std::vector<std::uint8_t> recall_defaulted;
    Index covered_samples = 0;

    double mean_precision() const { return map_precision.mean(); }
    double mean_recall() const { return map_recall.mean(); }
};

struct PixelRef {
    int row = 0;
    int col = 0;
};

/// Cell index of every sample; points on a max edge belong to the last cell.
/// Throws when a sample falls outside the grid bounds.
std::vector<PixelRef> locate_pixels(const Embedding& embedding, const GridSpec& grid);

/// MA: fraction of samples whose pixel label matches their predicted label.
MapMetrics map_accuracy(const DecisionMap& map, const Embedding& embedding,
                        const std::vector<int>& predicted_labels);

/// MP_c / MR_c: per-class agreement between sample predictions and pixel
/// labels.  Classes with an empty denominator score 1 and are flagged.
MapMetrics map_precision_recall(const DecisionMap& map, const Embedding& embedding,
                                const std::vector<int>& predicted_labels);

/// All of the above in one pass; what the pipeline persists.
MapMetrics compute_map_metrics(const DecisionMap& map, const Embedding& embedding,
                               const std::vector<int>& predicted_labels);

struct RoundTripReport {
    std::vector<Index> indices;
    Vector squared_errors;             // per selected sample
    std::optional<double> mean_error;  // absent for an empty selection
    Matrix originals;                  // k x n
    Matrix reconstructions;            // k x n
};

/// Reconstructions of selected samples from their own embedding coordinates
/// (one P -> P^-1 round trip), with squared data-space errors.
RoundTripReport roundtrip_report(const Embedding& embedding, const InverseModel& inverse,
                                 const Dataset& originals, const std::vector<Index>& indices);

}  // namespace shapdbm
