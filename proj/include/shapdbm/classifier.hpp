#pragma once

#include "shapdbm/dataset.hpp"
#include "shapdbm/mlp.hpp"

#include <cstdint>
#include <vector>

namespace shapdbm {

/// Architecture of the classifier: layer widths run from the feature count to
/// the class count; the output is always softmax.
struct NetworkSpec {
    std::vector<int> layer_widths;
    Activation hidden = Activation::Relu;

    void validate() const;
};

struct TrainConfig {
    int epochs = 20;
    int batch_size = 64;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    std::uint64_t seed = 0;

    void validate() const;
};

struct NetworkModel {
    Mlp net;
    NetworkSpec spec;
    FitHistory history;
    std::uint64_t seed = 0;
};

struct EvalReport {
    double accuracy = 0.0;
    Vector precision;            // per class
    Vector recall;               // per class
    Eigen::MatrixXi confusion;   // rows = true label, cols = prediction
};

NetworkModel train_classifier(const Dataset& train, const NetworkSpec& spec,
                              const TrainConfig& config);

/// Class probabilities for one sample; components sum to 1.
Vector predict_proba(const NetworkModel& model, const Eigen::Ref<const Vector>& x);

/// Batched probabilities, one row per sample.
Matrix predict_proba(const NetworkModel& model, const Matrix& inputs);

/// Argmax of predict_proba; ties break toward the lowest class index.
int predict_class(const NetworkModel& model, const Eigen::Ref<const Vector>& x);

std::vector<int> predict_classes(const NetworkModel& model, const Matrix& inputs);

/// Tie-break helper shared by everything that votes on probabilities.
int argmax_lowest(const Eigen::Ref<const Vector>& values);

EvalReport evaluate(const NetworkModel& model, const Dataset& test);

}  // namespace shapdbm
