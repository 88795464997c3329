#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "stockfc/error.hpp"
#include "stockfc/rng.hpp"

namespace stockfc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// z = matrix * (x - mean); x - mean = dewhitening * z.
struct Whitening {
    VectorXd mean;
    MatrixXd matrix;
    MatrixXd dewhitening;

    static Whitening identity(Index width) {
        return {VectorXd::Zero(width), MatrixXd::Identity(width, width),
                MatrixXd::Identity(width, width)};
    }
};

struct WhitenResult {
    MatrixXd whitened;  // samples x features
    Whitening transform;
};

namespace detail {

inline std::string name_of(Index col, const std::vector<std::string>& names) {
    const auto i = static_cast<std::size_t>(col);
    return i < names.size() ? names[i] : "#" + std::to_string(col);
}

}  // namespace detail

/// Centres the data and rotates/scales it to identity (population)
/// covariance through the eigendecomposition of the covariance matrix.
inline WhitenResult whiten(const MatrixXd& data, const std::vector<std::string>& names = {}) {
    const Index n = data.rows();
    const Index d = data.cols();
    if (d == 0) throw DataError("whiten: no columns");
    if (n <= d) throw DataError("whiten: need more samples than features");
    if (!data.allFinite()) throw DataError("whiten: non-finite input");

    WhitenResult out;
    out.transform.mean = data.colwise().mean().transpose();
    const MatrixXd centred = data.rowwise() - out.transform.mean.transpose();
    const MatrixXd cov = centred.transpose() * centred / static_cast<double>(n);

    std::string constant;
    for (Index c = 0; c < d; ++c) {
        const double scale = std::max(1.0, std::abs(out.transform.mean(c)));
        if (std::sqrt(cov(c, c)) <= 1e-12 * scale) {
            if (!constant.empty()) constant += ", ";
            constant += detail::name_of(c, names);
        }
    }
    if (!constant.empty()) throw DataError("whiten: rank-deficient covariance; constant columns: " + constant);

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericalError("whiten: eigendecomposition failed");
    const VectorXd& values = eig.eigenvalues();  // ascending
    const MatrixXd& vectors = eig.eigenvectors();
    if (!(values(0) > 1e-10 * values(d - 1))) {
        // Name the columns that carry the null direction(s).
        std::vector<bool> involved(static_cast<std::size_t>(d), false);
        for (Index k = 0; k < d && !(values(k) > 1e-10 * values(d - 1)); ++k)
            for (Index c = 0; c < d; ++c)
                if (std::abs(vectors(c, k)) > 0.1) involved[static_cast<std::size_t>(c)] = true;
        std::string cols;
        for (Index c = 0; c < d; ++c)
            if (involved[static_cast<std::size_t>(c)]) {
                if (!cols.empty()) cols += ", ";
                cols += detail::name_of(c, names);
            }
        throw DataError("whiten: rank-deficient covariance; dependent columns: " + cols);
    }

    const VectorXd inv_sqrt = values.array().rsqrt();
    const VectorXd sqrt_vals = values.array().sqrt();
    out.transform.matrix = inv_sqrt.asDiagonal() * vectors.transpose();
    out.transform.dewhitening = vectors * sqrt_vals.asDiagonal();
    out.whitened = centred * out.transform.matrix.transpose();
    return out;
}

struct IcaOptions {
    Index n_components = 0;  // 0: min(features, samples - 1, 10)
    std::uint64_t seed = 0;
    double tol = 1e-6;
    std::size_t max_iter = 500;
};

struct IcaResult {
    MatrixXd mixing_estimate;  // features x components, original units
    MatrixXd unmixing;         // components x features, whitened space
    MatrixXd components;       // samples x components
    Whitening whitening;
    std::size_t n_iterations = 0;  // largest per-component count
    bool converged = false;

    /// Unmixing composed with whitening: components x original features.
    MatrixXd loadings() const { return unmixing * whitening.matrix; }
};

namespace detail {

inline void deflate(VectorXd& w, const MatrixXd& rows, Index count) {
    // Two Gram-Schmidt sweeps keep the rows orthogonal to working precision.
    for (int sweep = 0; sweep < 2; ++sweep)
        for (Index j = 0; j < count; ++j) w -= w.dot(rows.row(j).transpose()) * rows.row(j).transpose();
}

inline VectorXd random_direction(Rng& rng, Index d, const MatrixXd& rows, Index count) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        VectorXd w(d);
        for (Index i = 0; i < d; ++i) w(i) = rng.normal();
        deflate(w, rows, count);
        const double norm = w.norm();
        if (norm > 1e-8) return w / norm;
    }
    throw NumericalError("fastica: cannot draw a direction orthogonal to previous components");
}

}  // namespace detail

/// Deflationary fixed-point ICA with the log-cosh (tanh) contrast. Rows are
/// extracted one at a time and kept orthonormal in whitened space. A row has
/// converged when its direction changes by less than `tol`
/// (1 - |<w_new, w_old>| < tol). Non-convergence is reported through the
/// flag, not an exception.
inline IcaResult fastica(const WhitenResult& white, const IcaOptions& options = {}) {
    const MatrixXd& Z = white.whitened;
    const Index n = Z.rows();
    const Index d = Z.cols();
    if (n < 2 || d == 0) throw DataError("fastica: not enough data");
    Index m = options.n_components;
    if (m == 0) m = std::min<Index>({d, n - 1, 10});
    if (m < 1 || m > d) throw DataError("fastica: n_components must lie in [1, features]");
    if (!(options.tol > 0.0) || options.max_iter < 1) throw ConfigError("fastica: invalid tol or max_iter");

    Rng rng(options.seed);
    IcaResult out;
    out.whitening = white.transform;
    out.unmixing = MatrixXd::Zero(m, d);
    out.converged = true;
    const auto inv_n = 1.0 / static_cast<double>(n);

    for (Index p = 0; p < m; ++p) {
        VectorXd w = detail::random_direction(rng, d, out.unmixing, p);
        bool done = false;
        std::size_t it = 0;
        while (it < options.max_iter && !done) {
            ++it;
            const VectorXd u = Z * w;
            const VectorXd g = u.array().tanh();
            const double g_prime_mean = (1.0 - g.array().square()).mean();
            VectorXd next = (Z.transpose() * g) * inv_n - g_prime_mean * w;
            detail::deflate(next, out.unmixing, p);
            const double norm = next.norm();
            if (!(norm > 1e-12)) {
                next = detail::random_direction(rng, d, out.unmixing, p);
            } else {
                next /= norm;
            }
            done = 1.0 - std::abs(next.dot(w)) < options.tol;
            w = next;
        }
        out.unmixing.row(p) = w.transpose();
        out.n_iterations = std::max(out.n_iterations, it);
        out.converged = out.converged && done;
    }

    out.components = Z * out.unmixing.transpose();
    out.mixing_estimate = out.whitening.dewhitening * out.unmixing.transpose();
    return out;
}

/// Treats `whitened` as already white (identity whitening record).
inline IcaResult fastica(const MatrixXd& whitened, Index n_components, std::uint64_t seed,
                         double tol = 1e-6, std::size_t max_iter = 500) {
    WhitenResult white{whitened, Whitening::identity(whitened.cols())};
    white.transform.mean = whitened.colwise().mean().transpose();
    return fastica(white, IcaOptions{n_components, seed, tol, max_iter});
}

/// Amari distance of a square gain matrix P = W_est * A_true from a scaled
/// permutation, normalized to [0, 1]; 0 is perfect recovery.
inline double amari_index(const MatrixXd& P) {
    const Index k = P.rows();
    if (k != P.cols() || k < 2) throw DataError("amari_index: need a square matrix of size >= 2");
    const MatrixXd A = P.cwiseAbs();
    double total = 0.0;
    for (Index i = 0; i < k; ++i) total += A.row(i).sum() / A.row(i).maxCoeff() - 1.0;
    for (Index j = 0; j < k; ++j) total += A.col(j).sum() / A.col(j).maxCoeff() - 1.0;
    return total / (2.0 * static_cast<double>(k) * static_cast<double>(k - 1));
}

struct VariableSubset {
    std::vector<std::string> selected_names;
    std::vector<double> scores;  // aligned with selected_names, non-increasing
};

/// Scores each variable by its largest absolute loading over the retained
/// components and keeps the top k, where k is the component count clamped to
/// [k_min, k_max] and to the number of variables. Equal scores keep input
/// order.
inline VariableSubset select_variables(const IcaResult& result,
                                       const std::vector<std::string>& feature_names,
                                       std::size_t k_min = 3, std::size_t k_max = 7) {
    const MatrixXd L = result.loadings();
    if (static_cast<Index>(feature_names.size()) != L.cols())
        throw DataError("select_variables: feature name count does not match unmixing columns");
    if (k_min > k_max) throw ConfigError("select_variables: k_min exceeds k_max");
    if (k_min > feature_names.size())
        throw DataError("select_variables: k_min exceeds the number of variables");

    std::vector<double> score(feature_names.size());
    for (Index c = 0; c < L.cols(); ++c) score[static_cast<std::size_t>(c)] = L.col(c).cwiseAbs().maxCoeff();

    std::vector<std::size_t> order(feature_names.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

    std::size_t k = std::clamp(static_cast<std::size_t>(L.rows()), k_min, k_max);
    k = std::min(k, feature_names.size());
    VariableSubset out;
    for (std::size_t i = 0; i < k; ++i) {
        out.selected_names.push_back(feature_names[order[i]]);
        out.scores.push_back(score[order[i]]);
    }
    return out;
}

}  // namespace stockfc
