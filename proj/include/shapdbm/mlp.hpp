#pragma once

#include "shapdbm/common.hpp"

#include <cstdint>
#include <vector>

namespace shapdbm {

enum class Activation { Relu, Tanh };
enum class OutputKind { Softmax, Sigmoid };
enum class Optimizer { SgdMomentum, Adam };

struct LayerParams {
    Matrix weights;  // out x in
    Vector bias;     // out
};

struct MlpShape {
    std::vector<int> widths;  // input width first, output width last
    Activation hidden = Activation::Relu;
    OutputKind output = OutputKind::Softmax;

    int input_width() const { return widths.front(); }
    int output_width() const { return widths.back(); }
    void validate() const;
};

/// Dense network with a softmax head (cross-entropy loss) or a sigmoid head
/// (mean squared error loss).  Samples are matrix rows.
class Mlp {
  public:
    Mlp() = default;
    /// Glorot-uniform initialization, seeded.
    Mlp(MlpShape shape, std::uint64_t seed);
    Mlp(MlpShape shape, std::vector<LayerParams> params);

    const MlpShape& shape() const { return shape_; }
    const std::vector<LayerParams>& params() const { return params_; }
    std::vector<LayerParams>& params() { return params_; }

    /// Batched forward pass with the output activation applied.
    Matrix forward(const Matrix& inputs) const;

    /// Mean loss over the batch (cross-entropy or MSE depending on the head).
    double loss(const Matrix& inputs, const Matrix& targets) const;

    /// Loss plus analytic parameter gradients via backpropagation.
    double loss_and_gradients(const Matrix& inputs, const Matrix& targets,
                              std::vector<LayerParams>& gradients) const;

    void check_finite() const;

  private:
    double loss_impl(const Matrix& inputs, const Matrix& targets,
                     std::vector<LayerParams>* gradients) const;

    MlpShape shape_;
    std::vector<LayerParams> params_;
};

struct FitConfig {
    int epochs = 100;
    int batch_size = 64;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    double momentum = 0.9;    // sgd-momentum
    double beta1 = 0.9;       // adam
    double beta2 = 0.999;     // adam
    double epsilon = 1e-8;    // adam
    std::uint64_t seed = 0;
};

struct FitHistory {
    std::vector<double> epoch_loss;

    double first_epoch_loss() const { return epoch_loss.front(); }
    double final_epoch_loss() const { return epoch_loss.back(); }
};

/// Mini-batch training with seeded shuffling.  Throws DivergenceError when
/// the loss stops being finite.
FitHistory fit(Mlp& model, const Matrix& inputs, const Matrix& targets,
               const FitConfig& config);

/// One-hot encoding of labels, used as cross-entropy targets.
Matrix one_hot(const std::vector<int>& labels, int class_count);

}  // namespace shapdbm
