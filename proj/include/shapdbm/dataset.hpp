#pragma once

#include "shapdbm/common.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace shapdbm {

/// A labelled dataset.  Features live in [0,1]; labels in [0, class_count).
struct Dataset {
    Matrix features;          // sample_count x feature_count
    std::vector<int> labels;  // length sample_count
    int feature_count = 0;
    int class_count = 0;

    Index sample_count() const { return features.rows(); }

    /// Throws ConsistencyError when an invariant is broken.
    void validate() const;
};

struct SplitPair {
    Dataset train;
    Dataset test;
};

enum class SyntheticKind { Blobs, Moons, Confounded };

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::Blobs;
    int samples_per_class = 100;
    int feature_count = 2;
    int class_count = 2;
    double noise = 0.05;
    int nuisance_count = 0;  // confounded only
    std::uint64_t seed = 0;
};

/// Reads an IDX image/label file pair (big-endian, magic 0x803 / 0x801).
/// Pixels are scaled into [0,1]; images flatten row-major.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// Reads a rectangular numeric CSV.  The label column must hold integer
/// values; remaining columns become features, min-max normalized per column
/// (constant columns map to 0).  Distinct label values are relabelled to
/// 0..C-1 in sorted order.
Dataset load_csv(const std::filesystem::path& path, int label_column,
                 bool header_row = false);

Dataset make_synthetic(const SyntheticSpec& spec);

/// The confounded generator keeps informative features inside this narrow
/// window so the wide-spread nuisance features dominate data-space distances.
inline constexpr double kConfoundedInformativeLow = 0.375;
inline constexpr double kConfoundedInformativeSpan = 0.25;

/// Class label the confounded generator assigned, recomputed from the
/// informative features alone.  Exposed so tests can verify the construction.
int confounded_label_rule(const Eigen::Ref<const Vector>& features,
                          int informative_count, int class_count);

/// Stratified, seeded train/test split with disjoint halves.
SplitPair split(const Dataset& data, double test_fraction, std::uint64_t seed);

}  // namespace shapdbm
