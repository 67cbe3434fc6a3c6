#include "shapdbm/classifier.hpp"

#include "shapdbm/rng.hpp"

#include <cmath>

namespace shapdbm {

void NetworkSpec::validate() const {
    if (layer_widths.size() < 3) {
        throw ArgumentError("classifier needs at least one hidden layer");
    }
    for (int w : layer_widths) {
        if (w < 1) {
            throw ArgumentError("classifier layer widths must be positive");
        }
    }
}

void TrainConfig::validate() const {
    if (epochs < 1 || batch_size < 1) {
        throw ArgumentError("train config: counts must be positive");
    }
    if (learning_rate <= 0.0) {
        throw ArgumentError("train config: learning rate must be > 0");
    }
}

NetworkModel train_classifier(const Dataset& train, const NetworkSpec& spec,
                              const TrainConfig& config) {
    spec.validate();
    config.validate();
    train.validate();
    if (spec.layer_widths.front() != train.feature_count) {
        throw ArgumentError("network input width " + std::to_string(spec.layer_widths.front()) +
                            " != feature count " + std::to_string(train.feature_count));
    }
    if (spec.layer_widths.back() != train.class_count) {
        throw ArgumentError("network output width " + std::to_string(spec.layer_widths.back()) +
                            " != class count " + std::to_string(train.class_count));
    }

    NetworkModel model;
    model.spec = spec;
    model.seed = config.seed;
    model.net = Mlp(MlpShape{spec.layer_widths, spec.hidden, OutputKind::Softmax},
                    derive_seed(config.seed, "init"));

    FitConfig fit_config;
    fit_config.epochs = config.epochs;
    fit_config.batch_size = config.batch_size;
    fit_config.learning_rate = config.learning_rate;
    fit_config.optimizer = config.optimizer;
    fit_config.momentum = config.momentum;
    fit_config.beta1 = config.beta1;
    fit_config.beta2 = config.beta2;
    fit_config.seed = derive_seed(config.seed, "fit");

    model.history = fit(model.net, train.features, one_hot(train.labels, train.class_count),
                        fit_config);
    return model;
}

Vector predict_proba(const NetworkModel& model, const Eigen::Ref<const Vector>& x) {
    if (x.size() != model.net.shape().input_width()) {
        throw ArgumentError("sample width " + std::to_string(x.size()) +
                            " does not match network input " +
                            std::to_string(model.net.shape().input_width()));
    }
    Matrix row = x.transpose();
    return model.net.forward(row).row(0).transpose();
}

Matrix predict_proba(const NetworkModel& model, const Matrix& inputs) {
    return model.net.forward(inputs);
}

int argmax_lowest(const Eigen::Ref<const Vector>& values) {
    int best = 0;
    for (int i = 1; i < values.size(); ++i) {
        if (values(i) > values(best)) {
            best = i;
        }
    }
    return best;
}

int predict_class(const NetworkModel& model, const Eigen::Ref<const Vector>& x) {
    return argmax_lowest(predict_proba(model, x));
}

std::vector<int> predict_classes(const NetworkModel& model, const Matrix& inputs) {
    const Matrix probs = predict_proba(model, inputs);
    std::vector<int> out(static_cast<std::size_t>(probs.rows()));
    for (Index i = 0; i < probs.rows(); ++i) {
        out[static_cast<std::size_t>(i)] = argmax_lowest(probs.row(i).transpose());
    }
    return out;
}

EvalReport evaluate(const NetworkModel& model, const Dataset& test) {
    test.validate();
    if (test.sample_count() == 0) {
        throw ArgumentError("evaluate: empty test set");
    }
    if (test.feature_count != model.net.shape().input_width()) {
        throw ArgumentError("evaluate: feature count does not match model");
    }
    const int C = test.class_count;

    EvalReport report;
    report.confusion = Eigen::MatrixXi::Zero(C, C);
    const std::vector<int> predictions = predict_classes(model, test.features);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        report.confusion(test.labels[i], predictions[i]) += 1;
    }

    long correct = 0;
    for (int c = 0; c < C; ++c) {
        correct += report.confusion(c, c);
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(test.sample_count());

    report.precision.resize(C);
    report.recall.resize(C);
    for (int c = 0; c < C; ++c) {
        const long predicted = report.confusion.col(c).sum();
        const long actual = report.confusion.row(c).sum();
        const long hits = report.confusion(c, c);
        // A class absent from both labels and predictions scores 1 by
        // convention; absent from only one side scores 0.
        if (predicted == 0) {
            report.precision(c) = (actual == 0) ? 1.0 : 0.0;
        } else {
            report.precision(c) = static_cast<double>(hits) / static_cast<double>(predicted);
        }
        if (actual == 0) {
            report.recall(c) = (predicted == 0) ? 1.0 : 0.0;
        } else {
            report.recall(c) = static_cast<double>(hits) / static_cast<double>(actual);
        }
    }
    return report;
}

}  // namespace shapdbm
