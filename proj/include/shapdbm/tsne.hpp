#pragma once

#include "shapdbm/common.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace shapdbm {

struct TsneConfig {
    double perplexity = 30.0;
    int iterations = 1000;
    double learning_rate = 200.0;
    double exaggeration = 12.0;
    int exaggeration_iterations = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch_iteration = 250;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware default

    void validate(Index sample_count) const;
};

/// 2D embedding with the tight bounding box of its points.
struct Embedding {
    Matrix coords;  // N x 2
    Bounds bounds;

    Index size() const { return coords.rows(); }
};

Bounds bounds_of(const Matrix& coords);

/// KL divergence against the un-exaggerated affinities, recorded at fixed
/// iteration checkpoints during optimization.
struct TsneTrace {
    std::vector<std::pair<int, double>> kl_checkpoints;

    double kl_at(int iteration) const;
};

/// Symmetric t-SNE input affinities.  Per-row bandwidths are bisected until
/// the conditional distribution's entropy matches log2(perplexity); the
/// symmetrized matrix is nonnegative with zero diagonal and sums to 1.
Matrix pairwise_affinities(const Matrix& inputs, double perplexity, int threads = 0);

/// From-scratch exact-gradient t-SNE with early exaggeration and the
/// two-stage momentum schedule; deterministic for a fixed seed.
Embedding tsne_fit(const Matrix& inputs, const TsneConfig& config, TsneTrace* trace = nullptr);

}  // namespace shapdbm
