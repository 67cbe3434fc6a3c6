#pragma once

#include "shapdbm/classifier.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace shapdbm {

/// Reference samples defining feature absence; drawn from the test set.
struct BackgroundSet {
    Matrix samples;  // B x n

    Index size() const { return samples.rows(); }
};

/// Seeded draw of `count` rows from the test set (all rows when the set is
/// smaller than `count`).
BackgroundSet sample_background(const Dataset& test, int count, std::uint64_t seed);

/// Per-sample, per-feature attributions of the predicted-class probability.
struct ShapleyMatrix {
    Matrix values;        // N x n (or N x n*C with per-class concatenation)
    Vector base_values;   // expected model output over the background
    std::string explained_output = "predicted_class_probability";
};

/// Mean model output over the background with `present` features taken from
/// x and all others taken from the background row (interventional
/// replacement).
double coalition_value(const NetworkModel& model, const Eigen::Ref<const Vector>& x,
                       const BackgroundSet& background, const std::vector<int>& present,
                       int target_class);

/// Exact Shapley values by coalition enumeration; guarded to n <= 20.
Vector exact_shapley(const NetworkModel& model, const Eigen::Ref<const Vector>& x,
                     const BackgroundSet& background, int target_class);

/// Exact Shapley values of an abstract set function over n <= 20 players.
/// `value` receives a bitmask of present players.  This is the enumeration
/// core behind exact_shapley; exposed so tests can drive it with analytic
/// games.
Vector exact_shapley_game(int n, const std::function<double(std::uint32_t)>& value);

/// Monte-Carlo permutation estimate of the Shapley values; deterministic for
/// a fixed seed.
Vector mc_shapley(const NetworkModel& model, const Eigen::Ref<const Vector>& x,
                  const BackgroundSet& background, int target_class, int permutations,
                  std::uint64_t seed);

struct ShapleyConfig {
    int permutations = 200;
    std::uint64_t seed = 0;
    int threads = 0;               // 0 = hardware default
    bool concat_classes = false;   // one block of n values per class instead
                                   // of the predicted class only
    int subset = 0;                // attribute only the first k samples (0 = all)
};

/// Row i holds the attribution of sample i toward its predicted class.  Rows
/// use seeds derived from (seed, i), so any row-level parallel schedule
/// produces results identical to sequential execution.
ShapleyMatrix shapley_dataset(const NetworkModel& model, const Dataset& data,
                              const BackgroundSet& background, const ShapleyConfig& config);

}  // namespace shapdbm
