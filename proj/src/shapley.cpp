#include "shapdbm/shapley.hpp"

#include "shapdbm/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#ifdef SHAPDBM_HAVE_OPENMP
#include <omp.h>
#endif

namespace shapdbm {

BackgroundSet sample_background(const Dataset& test, int count, std::uint64_t seed) {
    test.validate();
    if (count < 1) {
        throw ArgumentError("background count must be >= 1");
    }
    const Index available = test.sample_count();
    const Index take = std::min<Index>(count, available);

    std::vector<Index> order(static_cast<std::size_t>(available));
    for (Index i = 0; i < available; ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }
    Rng rng(seed);
    rng.shuffle(order);

    BackgroundSet bg;
    bg.samples.resize(take, test.feature_count);
    for (Index i = 0; i < take; ++i) {
        bg.samples.row(i) = test.features.row(order[static_cast<std::size_t>(i)]);
    }
    return bg;
}

namespace {

void check_widths(const NetworkModel& model, Index x_width, const BackgroundSet& background) {
    const int n = model.net.shape().input_width();
    if (x_width != n) {
        throw ArgumentError("sample width does not match model input");
    }
    if (background.size() == 0) {
        throw ArgumentError("background set is empty");
    }
    if (background.samples.cols() != n) {
        throw ArgumentError("background width does not match model input");
    }
}

/// Mean predicted-class probability over a batch of hybrids, one per
/// background row, with present-ness given as a bitmask (n <= 20 paths).
double coalition_value_mask(const NetworkModel& model, const Eigen::Ref<const Vector>& x,
                            const BackgroundSet& background, std::uint32_t mask,
                            int target_class) {
    const Index b = background.size();
    Matrix hybrids = background.samples;
    for (int k = 0; k < x.size(); ++k) {
        if (mask & (1u << k)) {
            hybrids.col(k).setConstant(x(k));
        }
    }
    const Matrix probs = predict_proba(model, hybrids);
    return probs.col(target_class).sum() / static_cast<double>(b);
}

}  // namespace

double coalition_value(const NetworkModel& model, const Eigen::Ref<const Vector>& x,
                       const BackgroundSet& background, const std::vector<int>& present,
                       int target_class) {
    check_widths(model, x.size(), background);
    if (target_class < 0 || target_class >= model.net.shape().output_width()) {
        throw ArgumentError("target class out of range");
    }
    Matrix hybrids = background.samples;
    for (int k : present) {
        if (k < 0 || k >= x.size()) {
            throw ArgumentError("present feature index out of range: " + std::to_string(k));
        }
        hybrids.col(k).setConstant(x(k));
    }
    const Matrix probs = predict_proba(model, hybrids);
    return probs.col(target_class).sum() / static_cast<double>(background.size());
}

Vector exact_shapley_game(int n, const std::function<double(std::uint32_t)>& value) {
    if (n < 1 || n > 20) {
        throw ArgumentError("exact Shapley enumeration is guarded to 1 <= n <= 20; "
                            "use mc_shapley beyond that");
    }
    const std::uint32_t subsets = 1u << n;

    // One evaluation per coalition, then the weighted-marginal sum.
    std::vector<double> v(subsets);
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
        v[mask] = value(mask);
    }

    // weight(t) = t! (n-1-t)! / n! = 1 / (n * C(n-1, t))
    std::vector<double> weight(static_cast<std::size_t>(n));
    double binom = 1.0;  // C(n-1, t)
    for (int t = 0; t < n; ++t) {
        weight[static_cast<std::size_t>(t)] = 1.0 / (static_cast<double>(n) * binom);
        binom = binom * (n - 1 - t) / (t + 1);
    }

    Vector phi = Vector::Zero(n);
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
        const int t = std::popcount(mask);
        for (int k = 0; k < n; ++k) {
            if (mask & (1u << k)) {
                continue;
            }
            phi(k) += weight[static_cast<std::size_t>(t)] * (v[mask | (1u << k)] - v[mask]);
        }
    }
    return phi;
}

Vector exact_shapley(const NetworkModel& model, const Eigen::Ref<const Vector>& x,
                     const BackgroundSet& background, int target_class) {
    check_widths(model, x.size(), background);
    const int n = static_cast<int>(x.size());
    return exact_shapley_game(n, [&](std::uint32_t mask) {
        return coalition_value_mask(model, x, background, mask, target_class);
    });
}

Vector mc_shapley(const NetworkModel& model, const Eigen::Ref<const Vector>& x,
                  const BackgroundSet& background, int target_class, int permutations,
                  std::uint64_t seed) {
    check_widths(model, x.size(), background);
    if (permutations < 1) {
        throw ArgumentError("permutation count must be >= 1");
    }
    const int n = static_cast<int>(x.size());
    const Index b = background.size();

    Rng rng(seed);
    Vector phi = Vector::Zero(n);

    // For each permutation, walk the features in order and accumulate the
    // marginal contribution of each step.  The hybrid batch starts as the
    // background and gains one feature of x per step, so step t holds the
    // coalition of the first t features.
    Matrix hybrids(b, n);
    Vector step_values(n + 1);
    for (int p = 0; p < permutations; ++p) {
        const std::vector<int> order = rng.permutation(n);
        hybrids = background.samples;

        // Values of the n+1 nested coalitions, evaluated as one batch per
        // step to keep the model calls vectorized over the background.
        step_values(0) = predict_proba(model, hybrids).col(target_class).mean();
        for (int t = 0; t < n; ++t) {
            hybrids.col(order[static_cast<std::size_t>(t)]).setConstant(
                x(order[static_cast<std::size_t>(t)]));
            step_values(t + 1) = predict_proba(model, hybrids).col(target_class).mean();
        }
        for (int t = 0; t < n; ++t) {
            phi(order[static_cast<std::size_t>(t)]) += step_values(t + 1) - step_values(t);
        }
    }
    return phi / static_cast<double>(permutations);
}

ShapleyMatrix shapley_dataset(const NetworkModel& model, const Dataset& data,
                              const BackgroundSet& background, const ShapleyConfig& config) {
    data.validate();
    check_widths(model, data.features.cols(), background);
    if (config.permutations < 1) {
        throw ArgumentError("permutation count must be >= 1");
    }

    const Index total = data.sample_count();
    const Index rows = (config.subset > 0) ? std::min<Index>(config.subset, total) : total;
    const int n = data.feature_count;
    const int classes = model.net.shape().output_width();
    const int width = config.concat_classes ? n * classes : n;

    ShapleyMatrix out;
    out.values.resize(rows, width);
    out.base_values.resize(rows);
    out.explained_output = config.concat_classes ? "per_class_probabilities"
                                                 : "predicted_class_probability";

    const std::vector<int> predicted = predict_classes(model, data.features.topRows(rows));

    // Rows are independent and carry their own derived seed, so any parallel
    // schedule matches sequential output exactly.
#ifdef SHAPDBM_HAVE_OPENMP
    const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
    for (Index i = 0; i < rows; ++i) {
        const Vector x = data.features.row(i).transpose();
        const std::uint64_t row_seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
        if (config.concat_classes) {
            for (int c = 0; c < classes; ++c) {
                out.values.row(i).segment(static_cast<Index>(c) * n, n) =
                    mc_shapley(model, x, background, c, config.permutations,
                               derive_seed(row_seed, static_cast<std::uint64_t>(c)))
                        .transpose();
            }
        } else {
            out.values.row(i) = mc_shapley(model, x, background,
                                           predicted[static_cast<std::size_t>(i)],
                                           config.permutations, row_seed)
                                    .transpose();
        }
        out.base_values(i) = coalition_value(model, x, background, {},
                                             predicted[static_cast<std::size_t>(i)]);
    }
    return out;
}

}  // namespace shapdbm
