#include "shapdbm/inverse_projection.hpp"

#include "shapdbm/rng.hpp"

namespace shapdbm {

void InvTrainConfig::validate() const {
    if (hidden_widths.empty()) {
        throw ArgumentError("inverse projection needs at least one hidden layer");
    }
    for (int w : hidden_widths) {
        if (w < 1) {
            throw ArgumentError("inverse projection hidden widths must be positive");
        }
    }
    if (epochs < 1 || batch_size < 1 || learning_rate <= 0.0) {
        throw ArgumentError("inverse projection training config values must be positive");
    }
}

namespace {

Matrix rescale_points(const Matrix& points, const Bounds& bounds) {
    Matrix scaled(points.rows(), 2);
    scaled.col(0) = (points.col(0).array() - bounds.xmin) / bounds.width();
    scaled.col(1) = (points.col(1).array() - bounds.ymin) / bounds.height();
    return scaled;
}

}  // namespace

InverseModel train_inverse(const Embedding& embedding, const Dataset& targets,
                           const InvTrainConfig& config) {
    config.validate();
    targets.validate();
    if (embedding.size() != targets.sample_count()) {
        throw ArgumentError("embedding rows (" + std::to_string(embedding.size()) +
                            ") != target rows (" + std::to_string(targets.sample_count()) + ")");
    }
    if (embedding.bounds.degenerate()) {
        throw ArgumentError("embedding bounds are degenerate");
    }

    MlpShape shape;
    shape.widths.push_back(2);
    shape.widths.insert(shape.widths.end(), config.hidden_widths.begin(),
                        config.hidden_widths.end());
    shape.widths.push_back(targets.feature_count);
    shape.hidden = Activation::Relu;
    shape.output = OutputKind::Sigmoid;

    InverseModel model;
    model.train_bounds = embedding.bounds;
    model.seed = config.seed;
    model.net = Mlp(shape, derive_seed(config.seed, "init"));

    FitConfig fit_config;
    fit_config.epochs = config.epochs;
    fit_config.batch_size = config.batch_size;
    fit_config.learning_rate = config.learning_rate;
    fit_config.optimizer = config.optimizer;
    fit_config.seed = derive_seed(config.seed, "fit");

    const Matrix scaled = rescale_points(embedding.coords, embedding.bounds);
    model.history = fit(model.net, scaled, targets.features, fit_config);
    return model;
}

Vector invert(const InverseModel& model, double x, double y) {
    Matrix point(1, 2);
    point(0, 0) = x;
    point(0, 1) = y;
    return invert(model, point).row(0).transpose();
}

Matrix invert(const InverseModel& model, const Matrix& points) {
    if (points.cols() != 2) {
        throw ArgumentError("invert expects k x 2 coordinates");
    }
    if (!points.allFinite()) {
        throw ArgumentError("invert expects finite coordinates");
    }
    return model.net.forward(rescale_points(points, model.train_bounds));
}

}  // namespace shapdbm
