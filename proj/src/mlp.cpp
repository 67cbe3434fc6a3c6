#include "shapdbm/mlp.hpp"

#include "shapdbm/rng.hpp"

#include <cmath>

namespace shapdbm {

void MlpShape::validate() const {
    if (widths.size() < 3) {
        throw ArgumentError("network needs at least one hidden layer");
    }
    for (int w : widths) {
        if (w < 1) {
            throw ArgumentError("layer widths must be positive");
        }
    }
}

Mlp::Mlp(MlpShape shape, std::uint64_t seed) : shape_(std::move(shape)) {
    shape_.validate();
    Rng rng(seed);
    params_.reserve(shape_.widths.size() - 1);
    for (std::size_t l = 0; l + 1 < shape_.widths.size(); ++l) {
        const int fan_in = shape_.widths[l];
        const int fan_out = shape_.widths[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        LayerParams p;
        p.weights.resize(fan_out, fan_in);
        for (Index i = 0; i < p.weights.rows(); ++i) {
            for (Index j = 0; j < p.weights.cols(); ++j) {
                p.weights(i, j) = rng.uniform(-limit, limit);
            }
        }
        p.bias = Vector::Zero(fan_out);
        params_.push_back(std::move(p));
    }
}

Mlp::Mlp(MlpShape shape, std::vector<LayerParams> params)
    : shape_(std::move(shape)), params_(std::move(params)) {
    shape_.validate();
    if (params_.size() != shape_.widths.size() - 1) {
        throw ArgumentError("layer parameter count does not match shape");
    }
    for (std::size_t l = 0; l < params_.size(); ++l) {
        if (params_[l].weights.rows() != shape_.widths[l + 1] ||
            params_[l].weights.cols() != shape_.widths[l] ||
            params_[l].bias.size() != shape_.widths[l + 1]) {
            throw ArgumentError("layer " + std::to_string(l) + " has mismatched dimensions");
        }
    }
}

void Mlp::check_finite() const {
    for (const auto& p : params_) {
        if (!p.weights.allFinite() || !p.bias.allFinite()) {
            throw DivergenceError("network parameters are not finite");
        }
    }
}

namespace {

inline void apply_hidden(Matrix& z, Activation act) {
    if (act == Activation::Relu) {
        z = z.cwiseMax(0.0);
    } else {
        z = z.array().tanh().matrix();
    }
}

// Rowwise softmax with max-shift; safe for extreme logits.
inline Matrix softmax_rows(const Matrix& logits) {
    Matrix shifted = logits.colwise() - logits.rowwise().maxCoeff();
    Matrix e = shifted.array().exp().matrix();
    Vector sums = e.rowwise().sum();
    return e.array().colwise() / sums.array();
}

inline Matrix sigmoid(const Matrix& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

}  // namespace

Matrix Mlp::forward(const Matrix& inputs) const {
    if (inputs.cols() != shape_.input_width()) {
        throw ArgumentError("input width " + std::to_string(inputs.cols()) +
                            " does not match network input " +
                            std::to_string(shape_.input_width()));
    }
    Matrix a = inputs;
    for (std::size_t l = 0; l < params_.size(); ++l) {
        Matrix z = a * params_[l].weights.transpose();
        z.rowwise() += params_[l].bias.transpose();
        if (l + 1 < params_.size()) {
            apply_hidden(z, shape_.hidden);
            a = std::move(z);
        } else {
            return shape_.output == OutputKind::Softmax ? softmax_rows(z) : sigmoid(z);
        }
    }
    return a;  // unreachable; validate() guarantees >= 2 layers
}

double Mlp::loss(const Matrix& inputs, const Matrix& targets) const {
    return loss_impl(inputs, targets, nullptr);
}

double Mlp::loss_and_gradients(const Matrix& inputs, const Matrix& targets,
                               std::vector<LayerParams>& gradients) const {
    return loss_impl(inputs, targets, &gradients);
}

double Mlp::loss_impl(const Matrix& inputs, const Matrix& targets,
                      std::vector<LayerParams>* gradients) const {
    const Index batch = inputs.rows();
    if (batch == 0) {
        throw ArgumentError("empty batch");
    }
    if (targets.rows() != batch || targets.cols() != shape_.output_width()) {
        throw ArgumentError("target shape does not match network output");
    }

    // Forward, keeping post-activation values for the backward pass.
    std::vector<Matrix> activations;
    activations.reserve(params_.size());
    const Matrix* current = &inputs;
    for (std::size_t l = 0; l + 1 < params_.size(); ++l) {
        Matrix z = *current * params_[l].weights.transpose();
        z.rowwise() += params_[l].bias.transpose();
        apply_hidden(z, shape_.hidden);
        activations.push_back(std::move(z));
        current = &activations.back();
    }
    Matrix logits = *current * params_.back().weights.transpose();
    logits.rowwise() += params_.back().bias.transpose();

    double total_loss = 0.0;
    Matrix output_delta;  // dLoss/dlogits

    if (shape_.output == OutputKind::Softmax) {
        // Max-shifted log-softmax keeps extreme logits finite.
        Vector row_max = logits.rowwise().maxCoeff();
        Matrix shifted = logits.colwise() - row_max;
        Matrix e = shifted.array().exp().matrix();
        Vector sums = e.rowwise().sum();
        Matrix log_probs = shifted.colwise() - sums.array().log().matrix();
        total_loss = -(targets.array() * log_probs.array()).sum() / static_cast<double>(batch);
        Matrix probs = e.array().colwise() / sums.array();
        output_delta = (probs - targets) / static_cast<double>(batch);
    } else {
        Matrix y = sigmoid(logits);
        Matrix diff = y - targets;
        const double denom = static_cast<double>(batch) * shape_.output_width();
        total_loss = diff.array().square().sum() / denom;
        // MSE through the sigmoid: dL/dz = 2 diff * y (1-y) / denom
        output_delta =
            (2.0 / denom) * (diff.array() * y.array() * (1.0 - y.array())).matrix();
    }

    if (gradients == nullptr) {
        return total_loss;
    }

    gradients->resize(params_.size());
    Matrix delta = std::move(output_delta);
    for (std::size_t l = params_.size(); l-- > 0;) {
        const Matrix& below = (l == 0) ? inputs : activations[l - 1];
        (*gradients)[l].weights.noalias() = delta.transpose() * below;
        (*gradients)[l].bias = delta.colwise().sum().transpose();
        if (l == 0) {
            break;
        }
        Matrix upstream = delta * params_[l].weights;
        const Matrix& act = activations[l - 1];
        if (shape_.hidden == Activation::Relu) {
            delta = (upstream.array() * (act.array() > 0.0).cast<double>()).matrix();
        } else {
            delta = (upstream.array() * (1.0 - act.array().square())).matrix();
        }
    }
    return total_loss;
}

FitHistory fit(Mlp& model, const Matrix& inputs, const Matrix& targets,
               const FitConfig& config) {
    if (config.epochs < 1 || config.batch_size < 1 || config.learning_rate <= 0.0) {
        throw ArgumentError("fit: epochs and batch size must be positive, learning rate > 0");
    }
    const Index n_samples = inputs.rows();
    if (n_samples == 0 || targets.rows() != n_samples) {
        throw ArgumentError("fit: inputs and targets must have matching nonzero rows");
    }

    auto& params = model.params();
    std::vector<LayerParams> gradients;

    // Optimizer state
    std::vector<LayerParams> velocity(params.size());
    std::vector<LayerParams> moment2(params.size());
    for (std::size_t l = 0; l < params.size(); ++l) {
        velocity[l].weights = Matrix::Zero(params[l].weights.rows(), params[l].weights.cols());
        velocity[l].bias = Vector::Zero(params[l].bias.size());
        if (config.optimizer == Optimizer::Adam) {
            moment2[l].weights =
                Matrix::Zero(params[l].weights.rows(), params[l].weights.cols());
            moment2[l].bias = Vector::Zero(params[l].bias.size());
        }
    }
    long adam_step = 0;

    Rng rng(config.seed);
    std::vector<Index> order(static_cast<std::size_t>(n_samples));
    for (Index i = 0; i < n_samples; ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }

    FitHistory history;
    history.epoch_loss.reserve(static_cast<std::size_t>(config.epochs));

    Matrix batch_in, batch_target;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;

        for (Index start = 0; start < n_samples; start += config.batch_size) {
            const Index count = std::min<Index>(config.batch_size, n_samples - start);
            batch_in.resize(count, inputs.cols());
            batch_target.resize(count, targets.cols());
            for (Index k = 0; k < count; ++k) {
                const Index src = order[static_cast<std::size_t>(start + k)];
                batch_in.row(k) = inputs.row(src);
                batch_target.row(k) = targets.row(src);
            }

            const double batch_loss = model.loss_and_gradients(batch_in, batch_target, gradients);
            if (!std::isfinite(batch_loss)) {
                throw DivergenceError("training diverged at epoch " + std::to_string(epoch + 1) +
                                      " (learning rate " + std::to_string(config.learning_rate) +
                                      ")");
            }
            epoch_loss += batch_loss * static_cast<double>(count);

            if (config.optimizer == Optimizer::SgdMomentum) {
                for (std::size_t l = 0; l < params.size(); ++l) {
                    velocity[l].weights = config.momentum * velocity[l].weights -
                                          config.learning_rate * gradients[l].weights;
                    velocity[l].bias = config.momentum * velocity[l].bias -
                                       config.learning_rate * gradients[l].bias;
                    params[l].weights += velocity[l].weights;
                    params[l].bias += velocity[l].bias;
                }
            } else {
                ++adam_step;
                const double correction1 = 1.0 - std::pow(config.beta1, adam_step);
                const double correction2 = 1.0 - std::pow(config.beta2, adam_step);
                for (std::size_t l = 0; l < params.size(); ++l) {
                    auto& m1 = velocity[l];
                    auto& m2 = moment2[l];
                    const auto& g = gradients[l];
                    m1.weights = config.beta1 * m1.weights + (1.0 - config.beta1) * g.weights;
                    m2.weights = config.beta2 * m2.weights +
                                 (1.0 - config.beta2) * g.weights.array().square().matrix();
                    params[l].weights.array() -=
                        config.learning_rate * (m1.weights.array() / correction1) /
                        ((m2.weights.array() / correction2).sqrt() + config.epsilon);
                    m1.bias = config.beta1 * m1.bias + (1.0 - config.beta1) * g.bias;
                    m2.bias = config.beta2 * m2.bias +
                              (1.0 - config.beta2) * g.bias.array().square().matrix();
                    params[l].bias.array() -=
                        config.learning_rate * (m1.bias.array() / correction1) /
                        ((m2.bias.array() / correction2).sqrt() + config.epsilon);
                }
            }
        }
        history.epoch_loss.push_back(epoch_loss / static_cast<double>(n_samples));
    }

    model.check_finite();
    return history;
}

Matrix one_hot(const std::vector<int>& labels, int class_count) {
    Matrix t = Matrix::Zero(static_cast<Index>(labels.size()), class_count);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= class_count) {
            throw ArgumentError("label out of range at sample " + std::to_string(i));
        }
        t(static_cast<Index>(i), labels[i]) = 1.0;
    }
    return t;
}

}  // namespace shapdbm
