#include "shapdbm/tsne.hpp"

#include "shapdbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef SHAPDBM_HAVE_OPENMP
#include <omp.h>
#endif

namespace shapdbm {

namespace {

constexpr double kDistanceFloor = 1e-12;  // duplicate-row guard
constexpr double kAffinityFloor = 1e-12;  // keeps KL finite
constexpr double kLn2 = 0.6931471805599453;
constexpr int kBisectionIterations = 50;
constexpr double kEntropyTolerance = 1e-3;  // bits
constexpr int kKlCheckpointStride = 100;

#ifdef SHAPDBM_HAVE_OPENMP
int resolve_threads(int requested) {
    return requested > 0 ? requested : omp_get_max_threads();
}
#endif

/// Conditional affinities for one row at a fixed precision beta; returns the
/// entropy in bits.  Distances are shifted by their minimum before
/// exponentiation so large betas cannot underflow the whole row.
double row_entropy_bits(const double* sq_dist, Index n, Index self, double beta,
                        double* probs) {
    double shift = std::numeric_limits<double>::max();
    for (Index j = 0; j < n; ++j) {
        if (j != self) {
            shift = std::min(shift, sq_dist[j]);
        }
    }
    double sum = 0.0;
    double weighted = 0.0;
    for (Index j = 0; j < n; ++j) {
        if (j == self) {
            probs[j] = 0.0;
            continue;
        }
        const double centered = sq_dist[j] - shift;
        const double e = std::exp(-beta * centered);
        probs[j] = e;
        sum += e;
        weighted += centered * e;
    }
    const double entropy_nats = std::log(sum) + beta * weighted / sum;
    for (Index j = 0; j < n; ++j) {
        probs[j] /= sum;
    }
    return entropy_nats / kLn2;
}

/// Expanding bisection on beta until the row entropy hits log2(perplexity).
/// Returns false when the tolerance is not reached within the iteration cap.
bool calibrate_row(const double* sq_dist, Index n, Index self, double target_bits,
                   double* probs) {
    double beta = 1.0;
    double beta_lo = 0.0;
    double beta_hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kBisectionIterations; ++it) {
        const double entropy = row_entropy_bits(sq_dist, n, self, beta, probs);
        const double diff = entropy - target_bits;
        if (std::abs(diff) <= kEntropyTolerance) {
            return true;
        }
        if (diff > 0.0) {
            // Entropy too high: sharpen the kernel.
            beta_lo = beta;
            beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta + beta_hi);
        } else {
            beta_hi = beta;
            beta = 0.5 * (beta + beta_lo);
        }
    }
    return false;
}

}  // namespace

void TsneConfig::validate(Index sample_count) const {
    if (sample_count < 4) {
        throw ArgumentError("t-SNE needs at least 4 samples");
    }
    if (!(perplexity > 1.0)) {
        throw ArgumentError("perplexity must be > 1");
    }
    if (perplexity >= static_cast<double>(sample_count) / 3.0) {
        throw ArgumentError("perplexity must be < N/3");
    }
    if (iterations < 250) {
        throw ArgumentError("t-SNE needs at least 250 iterations");
    }
    if (learning_rate <= 0.0 || exaggeration <= 0.0 || exaggeration_iterations < 0 ||
        initial_momentum < 0.0 || final_momentum < 0.0 || momentum_switch_iteration < 0) {
        throw ArgumentError("t-SNE config values must be positive");
    }
}

Bounds bounds_of(const Matrix& coords) {
    if (coords.rows() == 0 || coords.cols() != 2) {
        throw ArgumentError("bounds need a nonempty N x 2 matrix");
    }
    Bounds b;
    b.xmin = coords.col(0).minCoeff();
    b.xmax = coords.col(0).maxCoeff();
    b.ymin = coords.col(1).minCoeff();
    b.ymax = coords.col(1).maxCoeff();
    return b;
}

double TsneTrace::kl_at(int iteration) const {
    for (const auto& [it, kl] : kl_checkpoints) {
        if (it == iteration) {
            return kl;
        }
    }
    throw ArgumentError("no KL checkpoint recorded at iteration " + std::to_string(iteration));
}

Matrix pairwise_affinities(const Matrix& inputs, double perplexity, int threads) {
    const Index n = inputs.rows();
    if (n < 4) {
        throw ArgumentError("t-SNE needs at least 4 samples");
    }
    if (!(perplexity > 1.0) || perplexity >= static_cast<double>(n) / 3.0) {
        throw ArgumentError("perplexity must satisfy 1 < perplexity < N/3");
    }
    const double target_bits = std::log2(perplexity);

    const Vector sq_norms = inputs.rowwise().squaredNorm();

    // Conditional affinities, one calibrated row at a time.  Distances are
    // computed in row blocks so the N x m product never materializes an
    // N x N distance matrix on top of the affinity matrix itself.
    Matrix conditional(n, n);
    const Index block = std::max<Index>(1, std::min<Index>(n, 512));
    int failed_row = -1;

#ifdef SHAPDBM_HAVE_OPENMP
#pragma omp parallel num_threads(resolve_threads(threads))
#endif
    {
        std::vector<double> sq_dist(static_cast<std::size_t>(n));
        std::vector<double> probs(static_cast<std::size_t>(n));
#ifdef SHAPDBM_HAVE_OPENMP
#pragma omp for schedule(static)
#endif
        for (Index start = 0; start < n; start += block) {
            const Index rows = std::min<Index>(block, n - start);
            const Matrix cross = inputs.middleRows(start, rows) * inputs.transpose();
            for (Index r = 0; r < rows; ++r) {
                const Index i = start + r;
                for (Index j = 0; j < n; ++j) {
                    const double d2 = sq_norms(i) + sq_norms(j) - 2.0 * cross(r, j);
                    sq_dist[static_cast<std::size_t>(j)] = std::max(d2, kDistanceFloor);
                }
                if (calibrate_row(sq_dist.data(), n, i, target_bits, probs.data())) {
                    for (Index j = 0; j < n; ++j) {
                        conditional(i, j) = probs[static_cast<std::size_t>(j)];
                    }
                } else {
#ifdef SHAPDBM_HAVE_OPENMP
#pragma omp critical
#endif
                    {
                        if (failed_row < 0 || i < failed_row) {
                            failed_row = static_cast<int>(i);
                        }
                    }
                }
            }
        }
    }
    if (failed_row >= 0) {
        throw ConvergenceError("affinity calibration did not converge on row " +
                               std::to_string(failed_row));
    }

    // Symmetrize in place: p_ij = (p_j|i + p_i|j) / 2N, floored off-diagonal.
    const double inv_2n = 1.0 / (2.0 * static_cast<double>(n));
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double p = std::max((conditional(i, j) + conditional(j, i)) * inv_2n,
                                      kAffinityFloor);
            conditional(i, j) = p;
            conditional(j, i) = p;
        }
        conditional(i, i) = 0.0;
    }
    return conditional;
}

Embedding tsne_fit(const Matrix& inputs, const TsneConfig& config, TsneTrace* trace) {
    const Index n = inputs.rows();
    config.validate(n);

    const Matrix affinities = pairwise_affinities(inputs, config.perplexity, config.threads);

    // Constant part of the KL divergence: sum p log p.
    double p_log_p = 0.0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double p = affinities(i, j);
            if (p > 0.0) {
                p_log_p += p * std::log(p);
            }
        }
    }

    Rng rng(config.seed);
    Matrix y(n, 2);
    for (Index i = 0; i < n; ++i) {
        y(i, 0) = 1e-4 * rng.normal();
        y(i, 1) = 1e-4 * rng.normal();
    }

    Matrix velocity = Matrix::Zero(n, 2);
    Matrix gradient(n, 2);
    Vector row_num_sums(n);
    Vector row_p_log_num(n);

    for (int iter = 0; iter < config.iterations; ++iter) {
        const bool exaggerating = iter < config.exaggeration_iterations;
        const double p_factor = exaggerating ? config.exaggeration : 1.0;
        const double momentum = (iter < config.momentum_switch_iteration)
                                    ? config.initial_momentum
                                    : config.final_momentum;
        const bool checkpoint =
            trace != nullptr &&
            ((iter + 1) % kKlCheckpointStride == 0 || iter + 1 == config.iterations);

        const double* yx = y.col(0).data();
        const double* yy = y.col(1).data();

        // Pass 1: Student-t numerator row sums; Z accumulates in row order so
        // the result does not depend on the parallel schedule.
#ifdef SHAPDBM_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(resolve_threads(config.threads))
#endif
        for (Index i = 0; i < n; ++i) {
            double sum = 0.0;
            const double xi = yx[i];
            const double yi = yy[i];
            for (Index j = 0; j < n; ++j) {
                const double dx = xi - yx[j];
                const double dy = yi - yy[j];
                sum += 1.0 / (1.0 + dx * dx + dy * dy);
            }
            row_num_sums(i) = sum - 1.0;  // drop the j == i term
        }
        double z = 0.0;
        for (Index i = 0; i < n; ++i) {
            z += row_num_sums(i);
        }

        // Pass 2: gradient (and, on checkpoints, sum p log num).
#ifdef SHAPDBM_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(resolve_threads(config.threads))
#endif
        for (Index i = 0; i < n; ++i) {
            double gx = 0.0;
            double gy = 0.0;
            double p_log_num = 0.0;
            const double xi = yx[i];
            const double yi = yy[i];
            const double* p_col = affinities.col(i).data();  // symmetric: col == row
            for (Index j = 0; j < n; ++j) {
                if (j == i) {
                    continue;
                }
                const double dx = xi - yx[j];
                const double dy = yi - yy[j];
                const double num = 1.0 / (1.0 + dx * dx + dy * dy);
                const double q = num / z;
                const double mult = (p_factor * p_col[j] - q) * num;
                gx += mult * dx;
                gy += mult * dy;
                if (checkpoint) {
                    p_log_num += p_col[j] * std::log(num);
                }
            }
            gradient(i, 0) = 4.0 * gx;
            gradient(i, 1) = 4.0 * gy;
            row_p_log_num(i) = p_log_num;
        }

        velocity = momentum * velocity - config.learning_rate * gradient;
        y += velocity;
        y.rowwise() -= y.colwise().mean();

        if (!y.allFinite()) {
            throw DivergenceError("t-SNE diverged at iteration " + std::to_string(iter + 1));
        }

        if (checkpoint) {
            double p_log_q = -std::log(z);  // sum_ij p_ij = 1
            for (Index i = 0; i < n; ++i) {
                p_log_q += row_p_log_num(i);
            }
            trace->kl_checkpoints.emplace_back(iter + 1, p_log_p - p_log_q);
        }
    }

    Embedding out;
    out.coords = std::move(y);
    out.bounds = bounds_of(out.coords);
    return out;
}

}  // namespace shapdbm
