#pragma once

#include "shapdbm/dataset.hpp"
#include "shapdbm/mlp.hpp"
#include "shapdbm/tsne.hpp"

#include <cstdint>
#include <vector>

namespace shapdbm {

struct InvTrainConfig {
    std::vector<int> hidden_widths = {32, 64, 128, 256};
    int epochs = 150;
    int batch_size = 64;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Learned inverse projection: 2D coordinate -> data-space sample in [0,1]^n.
/// Inputs pass through an affine rescale of the training bounds into [0,1]^2
/// before the network; the sigmoid head keeps outputs valid samples for any
/// query point, far outside the training bounds included.
struct InverseModel {
    Mlp net;
    Bounds train_bounds;
    FitHistory history;
    std::uint64_t seed = 0;

    int output_width() const { return net.shape().output_width(); }
};

/// Fits coordinates -> targets pairs (row-aligned).  In ShapDBM mode the
/// coordinates come from Shapley-space projections while the targets stay in
/// data space.
InverseModel train_inverse(const Embedding& embedding, const Dataset& targets,
                           const InvTrainConfig& config);

Vector invert(const InverseModel& model, double x, double y);

/// Batch inversion: k x 2 coordinates -> k x n samples, order preserved.
Matrix invert(const InverseModel& model, const Matrix& points);

}  // namespace shapdbm
