#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stockfc/dataset.hpp"
#include "stockfc/error.hpp"
#include "stockfc/rng.hpp"

namespace stockfc {

/// Parametric regressor usable by the Levenberg-Marquardt routines below:
/// a flat parameter vector, batch prediction and the Jacobian of the
/// predictions with respect to that vector.
template <class M>
concept LeastSquaresModel = requires(const M& m, const MatrixXd& X, const VectorXd& theta) {
    { parameters(m) } -> std::convertible_to<VectorXd>;
    { with_parameters(m, theta) } -> std::same_as<M>;
    { predict_batch(m, X) } -> std::convertible_to<VectorXd>;
    { jacobian(m, X) } -> std::convertible_to<MatrixXd>;
};

// ---------------------------------------------------------------------------
// Affine model y = w'x + b. Linear in its parameters, so one undamped
// Gauss-Newton step lands on the least-squares optimum.

struct AffineModel {
    VectorXd weights;
    double bias = 0.0;
};

inline VectorXd parameters(const AffineModel& m) {
    VectorXd theta(m.weights.size() + 1);
    theta << m.weights, m.bias;
    return theta;
}

inline AffineModel with_parameters(AffineModel m, const VectorXd& theta) {
    if (theta.size() != m.weights.size() + 1) throw DataError("affine model: parameter count mismatch");
    m.weights = theta.head(m.weights.size());
    m.bias = theta(theta.size() - 1);
    return m;
}

inline VectorXd predict_batch(const AffineModel& m, const MatrixXd& X) {
    if (X.cols() != m.weights.size()) throw DataError("affine model: input width mismatch");
    return (X * m.weights).array() + m.bias;
}

inline MatrixXd jacobian(const AffineModel& m, const MatrixXd& X) {
    if (X.cols() != m.weights.size()) throw DataError("affine model: input width mismatch");
    MatrixXd J(X.rows(), X.cols() + 1);
    J.leftCols(X.cols()) = X;
    J.col(X.cols()).setOnes();
    return J;
}

// ---------------------------------------------------------------------------
// Single-hidden-layer perceptron: logistic hidden units, identity output.
//
// Flat parameter layout: hidden weights (row-major, hidden x inputs), hidden
// biases, output weights, output bias.

struct MlpModel {
    std::array<Index, 3> layer_sizes{7, 14, 1};
    MatrixXd hidden_weights;  // hidden x inputs
    VectorXd hidden_bias;
    VectorXd output_weights;  // hidden
    double output_bias = 0.0;

    Index n_inputs() const { return layer_sizes[0]; }
    Index n_hidden() const { return layer_sizes[1]; }
    Index n_parameters() const { return n_hidden() * (n_inputs() + 2) + 1; }
};

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

/// Uniform weights in [-1/sqrt(fan_in), 1/sqrt(fan_in)] from a seeded stream.
inline MlpModel mlp_init(const std::vector<Index>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() != 3) throw ConfigError("mlp_init: exactly three layer sizes required");
    for (Index s : layer_sizes)
        if (s < 1) throw ConfigError("mlp_init: layer sizes must be >= 1");
    if (layer_sizes[2] != 1) throw ConfigError("mlp_init: output layer must have one unit");

    MlpModel m;
    m.layer_sizes = {layer_sizes[0], layer_sizes[1], layer_sizes[2]};
    Rng rng(seed);
    const double hidden_bound = 1.0 / std::sqrt(static_cast<double>(m.n_inputs()));
    const double output_bound = 1.0 / std::sqrt(static_cast<double>(m.n_hidden()));
    m.hidden_weights.resize(m.n_hidden(), m.n_inputs());
    for (Index j = 0; j < m.n_hidden(); ++j)
        for (Index i = 0; i < m.n_inputs(); ++i)
            m.hidden_weights(j, i) = rng.uniform(-hidden_bound, hidden_bound);
    m.hidden_bias.resize(m.n_hidden());
    for (Index j = 0; j < m.n_hidden(); ++j) m.hidden_bias(j) = rng.uniform(-hidden_bound, hidden_bound);
    m.output_weights.resize(m.n_hidden());
    for (Index j = 0; j < m.n_hidden(); ++j)
        m.output_weights(j) = rng.uniform(-output_bound, output_bound);
    m.output_bias = rng.uniform(-output_bound, output_bound);
    return m;
}

inline VectorXd parameters(const MlpModel& m) {
    const Index h = m.n_hidden();
    const Index in = m.n_inputs();
    VectorXd theta(m.n_parameters());
    Index p = 0;
    for (Index j = 0; j < h; ++j)
        for (Index i = 0; i < in; ++i) theta(p++) = m.hidden_weights(j, i);
    theta.segment(p, h) = m.hidden_bias;
    p += h;
    theta.segment(p, h) = m.output_weights;
    p += h;
    theta(p) = m.output_bias;
    return theta;
}

inline MlpModel with_parameters(MlpModel m, const VectorXd& theta) {
    if (theta.size() != m.n_parameters()) throw DataError("mlp: parameter count mismatch");
    const Index h = m.n_hidden();
    const Index in = m.n_inputs();
    Index p = 0;
    for (Index j = 0; j < h; ++j)
        for (Index i = 0; i < in; ++i) m.hidden_weights(j, i) = theta(p++);
    m.hidden_bias = theta.segment(p, h);
    p += h;
    m.output_weights = theta.segment(p, h);
    p += h;
    m.output_bias = theta(p);
    return m;
}

namespace detail {

inline void check_input_width(const MlpModel& m, Index cols) {
    if (cols != m.n_inputs())
        throw DataError("mlp: expected " + std::to_string(m.n_inputs()) + " inputs, got " +
                        std::to_string(cols));
}

inline MatrixXd hidden_activations(const MlpModel& m, const MatrixXd& X) {
    MatrixXd a = (X * m.hidden_weights.transpose()).rowwise() + m.hidden_bias.transpose();
    return a.unaryExpr([](double v) { return sigmoid(v); });
}

}  // namespace detail

inline double forward(const MlpModel& m, const VectorXd& x) {
    detail::check_input_width(m, x.size());
    const VectorXd s = (m.hidden_weights * x + m.hidden_bias).unaryExpr([](double v) { return sigmoid(v); });
    return m.output_weights.dot(s) + m.output_bias;
}

inline VectorXd predict_batch(const MlpModel& m, const MatrixXd& X) {
    detail::check_input_width(m, X.cols());
    return (detail::hidden_activations(m, X) * m.output_weights).array() + m.output_bias;
}

/// Analytic d(prediction)/d(parameter), one row per sample, columns in the
/// flat parameter layout.
inline MatrixXd jacobian(const MlpModel& m, const MatrixXd& X) {
    detail::check_input_width(m, X.cols());
    const Index h = m.n_hidden();
    const Index in = m.n_inputs();
    const MatrixXd s = detail::hidden_activations(m, X);
    MatrixXd J(X.rows(), m.n_parameters());
    for (Index r = 0; r < X.rows(); ++r) {
        Index p = 0;
        for (Index j = 0; j < h; ++j) {
            const double delta = m.output_weights(j) * s(r, j) * (1.0 - s(r, j));
            for (Index i = 0; i < in; ++i) J(r, p++) = delta * X(r, i);
        }
        for (Index j = 0; j < h; ++j) J(r, p++) = m.output_weights(j) * s(r, j) * (1.0 - s(r, j));
        for (Index j = 0; j < h; ++j) J(r, p++) = s(r, j);
        J(r, p) = 1.0;
    }
    return J;
}

// ---------------------------------------------------------------------------
// Levenberg-Marquardt

struct LmConfig {
    double lambda_init = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 10.0;
    std::size_t max_epochs = 37;
    double grad_tol = 1e-8;
    std::uint64_t seed = 42;

    void validate() const {
        if (!(lambda_init > 0.0)) throw ConfigError("lm: lambda_init must be > 0");
        if (!(lambda_up > 1.0) || !(lambda_down > 1.0))
            throw ConfigError("lm: lambda factors must be > 1");
        if (max_epochs < 1) throw ConfigError("lm: max_epochs must be >= 1");
        if (!(grad_tol >= 0.0)) throw ConfigError("lm: grad_tol must be >= 0");
    }
};

/// Solves (J'J + lambda * diag(J'J)) delta = J'r. Diagonal entries of J'J
/// that vanish (parameters with no influence on any sample) are floored so
/// that the damping still reaches them.
inline VectorXd lm_delta(const MatrixXd& J, const VectorXd& r, double lambda) {
    if (!(lambda >= 0.0)) throw DataError("lm: lambda must be >= 0");
    MatrixXd A = MatrixXd::Zero(J.cols(), J.cols());
    A.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
    A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
    const VectorXd g = J.transpose() * r;
    if (lambda > 0.0) {
        const double floor = 1e-12 * std::max(1.0, A.diagonal().maxCoeff());
        for (Index i = 0; i < A.rows(); ++i) A(i, i) += lambda * std::max(A(i, i), floor);
    }
    Eigen::LLT<MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw LinearSolveError("lm: damped normal equations are not positive definite (lambda = " +
                               std::to_string(lambda) + ")");
    VectorXd delta = llt.solve(g);
    if (!delta.allFinite()) throw LinearSolveError("lm: non-finite step");
    return delta;
}

template <LeastSquaresModel M>
struct LmStep {
    M model;
    double sse = 0.0;
    double lambda = 0.0;
    bool accepted = false;
    VectorXd delta;
};

namespace detail {

template <LeastSquaresModel M>
LmStep<M> lm_step_from(const M& model, const MatrixXd& X, const VectorXd& y, const MatrixXd& J,
                       const VectorXd& r, double sse, double lambda, double lambda_up,
                       double lambda_down) {
    LmStep<M> out{model, sse, lambda, false, lm_delta(J, r, lambda)};
    M candidate = with_parameters(model, VectorXd(parameters(model) + out.delta));
    const double trial = (y - predict_batch(candidate, X)).squaredNorm();
    if (std::isfinite(trial) && trial < sse) {
        out.model = std::move(candidate);
        out.sse = trial;
        out.lambda = lambda / lambda_down;
        out.accepted = true;
    } else {
        out.lambda = lambda * lambda_up;
    }
    return out;
}

}  // namespace detail

/// One damped Gauss-Newton step. Accepted only if it lowers the sum of
/// squared errors; the model is returned unchanged otherwise. `sse` is the
/// value after the accept/reject decision.
template <LeastSquaresModel M>
LmStep<M> lm_step(const M& model, const MatrixXd& X, const VectorXd& y, double lambda,
                  double lambda_up = 10.0, double lambda_down = 10.0) {
    if (X.rows() != y.size()) throw DataError("lm_step: X and y have different row counts");
    const VectorXd r = y - predict_batch(model, X);
    const MatrixXd J = jacobian(model, X);
    return detail::lm_step_from(model, X, y, J, r, r.squaredNorm(), lambda, lambda_up, lambda_down);
}

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double mse = 0.0;
    double lambda = 0.0;    // damping after the epoch's decision
    bool accepted = false;
};

struct TrainHistory {
    double initial_mse = 0.0;
    std::vector<EpochRecord> epochs;
    bool converged = false;  // stopped on the gradient tolerance
};

template <LeastSquaresModel M>
struct TrainResult {
    M model;
    TrainHistory history;
};

/// Full-batch LM, one step per epoch. Stops after `max_epochs` or once the
/// gradient norm |J'r| falls below `grad_tol`. A step whose damped system
/// cannot be factorized is recorded as rejected.
template <LeastSquaresModel M>
TrainResult<M> train_lm(M model, const MatrixXd& X, const VectorXd& y, const LmConfig& config) {
    config.validate();
    if (X.rows() == 0) throw DataError("train_lm: empty training set");
    if (X.rows() != y.size()) throw DataError("train_lm: X and y have different row counts");
    const auto n = static_cast<double>(X.rows());

    TrainResult<M> out{std::move(model), {}};
    VectorXd r = y - predict_batch(out.model, X);
    double sse = r.squaredNorm();
    out.history.initial_mse = sse / n;
    double lambda = config.lambda_init;

    MatrixXd J = jacobian(out.model, X);
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        EpochRecord rec;
        rec.epoch = epoch;
        try {
            auto step = detail::lm_step_from(out.model, X, y, J, r, sse, lambda, config.lambda_up,
                                             config.lambda_down);
            rec.accepted = step.accepted;
            if (step.accepted) {
                out.model = std::move(step.model);
                sse = step.sse;
            }
            lambda = step.lambda;
        } catch (const LinearSolveError&) {
            lambda *= config.lambda_up;
        }
        rec.mse = sse / n;
        rec.lambda = lambda;
        out.history.epochs.push_back(rec);

        if (rec.accepted) {
            r = y - predict_batch(out.model, X);
            J = jacobian(out.model, X);
        }
        if ((J.transpose() * r).norm() < config.grad_tol) {
            out.history.converged = true;
            break;
        }
    }
    return out;
}

template <LeastSquaresModel M>
TrainResult<M> train_lm(M model, const SupervisedSet& train, const LmConfig& config) {
    return train_lm(std::move(model), train.features, train.targets, config);
}

}  // namespace stockfc
