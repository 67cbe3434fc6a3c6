#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace shapdbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Eigen::Index;

/// Axis-aligned rectangle in embedding space.
struct Bounds {
    double xmin = 0.0;
    double xmax = 0.0;
    double ymin = 0.0;
    double ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool degenerate() const { return !(width() > 0.0) || !(height() > 0.0); }

    bool contains(double x, double y) const {
        return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
    }
    bool contains(const Bounds& other) const {
        return other.xmin >= xmin && other.xmax <= xmax && other.ymin >= ymin &&
               other.ymax <= ymax;
    }

    /// Expands by `fraction` of the extent on every side.
    Bounds expanded(double fraction) const {
        Bounds b = *this;
        const double dx = width() * fraction;
        const double dy = height() * fraction;
        b.xmin -= dx;
        b.xmax += dx;
        b.ymin -= dy;
        b.ymax += dy;
        return b;
    }
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or precondition violation.
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// Malformed file contents (bad magic, ragged rows, ...).
class FormatError : public Error {
  public:
    using Error::Error;
};

/// Structurally valid inputs that disagree with each other.
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

/// Parse failure with position information in the message.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Non-finite values during iterative optimization.
class DivergenceError : public Error {
  public:
    using Error::Error;
};

/// Iterative search failed to reach its tolerance.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// A stage subcommand is missing one of its upstream files.
class MissingArtifactError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace shapdbm
