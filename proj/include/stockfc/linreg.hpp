#pragma once

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "stockfc/error.hpp"

namespace stockfc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct AnovaTable {
    double regression_ss = 0.0;
    double residual_ss = 0.0;
    double total_ss = 0.0;
    Index df_regression = 0;
    Index df_residual = 0;
    Index df_total = 0;
    double regression_ms = 0.0;
    double residual_ms = 0.0;
    double f_statistic = 0.0;
    double f_p_value = 0.0;
};

/// OLS fit with an intercept. `coefficients`, `std_errors`, `t_values` and
/// `p_values` hold the intercept at index 0 followed by one entry per
/// feature; `standardized_betas` has one entry per feature only.
///
/// With zero residual degrees of freedom (n == k + 1) the inferential fields
/// are NaN.
struct RegressionFit {
    std::vector<std::string> feature_names;
    VectorXd coefficients;
    VectorXd std_errors;
    VectorXd t_values;
    VectorXd p_values;
    VectorXd standardized_betas;
    double r = 0.0;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double std_error_estimate = 0.0;
    double durbin_watson = 0.0;
    AnovaTable anova;
    VectorXd residuals;

    double intercept() const { return coefficients(0); }
    Index n_features() const { return static_cast<Index>(feature_names.size()); }
    Index n_observations() const { return residuals.size(); }

    /// Feature-only slice of the coefficient vector.
    VectorXd slopes() const { return coefficients.tail(coefficients.size() - 1); }
};

/// Sum of squared successive residual differences over the residual sum of
/// squares. Always within [0, 4].
inline double durbin_watson(const VectorXd& residuals) {
    if (residuals.size() < 2) throw NumericalError("durbin_watson: need at least two residuals");
    const double denom = residuals.squaredNorm();
    if (denom == 0.0) throw NumericalError("durbin_watson: residuals are all zero");
    const Index n = residuals.size();
    const double num = (residuals.tail(n - 1) - residuals.head(n - 1)).squaredNorm();
    return std::clamp(num / denom, 0.0, 4.0);
}

namespace detail {

inline double two_sided_t_p(double t, double df) {
    if (std::isnan(t) || !(df > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

inline double f_upper_p(double f, double df1, double df2) {
    if (std::isnan(f) || !(df1 > 0.0) || !(df2 > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(f)) return 0.0;
    const boost::math::fisher_f dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, std::max(0.0, f)));
}

inline std::string column_label(Index col, const std::vector<std::string>& names) {
    if (col == 0) return "(constant)";
    const auto i = static_cast<std::size_t>(col - 1);
    return i < names.size() ? names[i] : "#" + std::to_string(col - 1);
}

}  // namespace detail

/// Least squares via column-pivoted Householder QR on [1 | X].
inline RegressionFit ols_fit(const MatrixXd& X, const VectorXd& y,
                             const std::vector<std::string>& feature_names) {
    const Index n = X.rows();
    const Index k = X.cols();
    if (y.size() != n) throw DataError("ols_fit: X and y have different row counts");
    if (static_cast<Index>(feature_names.size()) != k)
        throw DataError("ols_fit: feature name count does not match X columns");
    if (n < k + 1) throw DataError("ols_fit: need at least features + 1 observations");
    if (!X.allFinite() || !y.allFinite()) throw DataError("ols_fit: non-finite input");

    MatrixXd design(n, k + 1);
    design.col(0).setOnes();
    design.rightCols(k) = X;

    Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < k + 1) {
        std::string cols;
        for (Index j = qr.rank(); j < k + 1; ++j) {
            if (!cols.empty()) cols += ", ";
            cols += detail::column_label(qr.colsPermutation().indices()(j), feature_names);
        }
        throw SingularDesignError("ols_fit: design matrix is rank deficient; collinear columns: " +
                                  cols);
    }

    RegressionFit fit;
    fit.feature_names = feature_names;
    fit.coefficients = qr.solve(y);
    const VectorXd fitted = design * fit.coefficients;
    fit.residuals = y - fitted;

    const double y_mean = y.mean();
    auto& a = fit.anova;
    a.residual_ss = fit.residuals.squaredNorm();
    a.total_ss = (y.array() - y_mean).square().sum();
    a.regression_ss = (fitted.array() - y_mean).square().sum();
    a.df_regression = k;
    a.df_residual = n - k - 1;
    a.df_total = n - 1;
    if (a.total_ss == 0.0) throw NumericalError("ols_fit: target has zero variance");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto df_res = static_cast<double>(a.df_residual);
    a.regression_ms = k > 0 ? a.regression_ss / static_cast<double>(k) : nan;
    a.residual_ms = a.df_residual > 0 ? a.residual_ss / df_res : nan;
    if (k == 0 || a.df_residual == 0) {
        a.f_statistic = nan;
    } else if (a.residual_ss == 0.0) {
        a.f_statistic = std::numeric_limits<double>::infinity();
    } else {
        a.f_statistic = a.regression_ms / a.residual_ms;
    }
    a.f_p_value = detail::f_upper_p(a.f_statistic, static_cast<double>(k), df_res);

    fit.r_squared = std::clamp(a.regression_ss / a.total_ss, 0.0, 1.0);
    fit.r = std::sqrt(fit.r_squared);
    fit.adj_r_squared = a.df_residual > 0
                            ? 1.0 - (1.0 - fit.r_squared) * static_cast<double>(n - 1) / df_res
                            : nan;
    fit.std_error_estimate = a.df_residual > 0 ? std::sqrt(a.residual_ms) : nan;

    // (D'D)^-1 = P R^-1 R^-T P'
    const MatrixXd r_upper = qr.matrixR().topLeftCorner(k + 1, k + 1).template triangularView<Eigen::Upper>();
    const MatrixXd r_inv = r_upper.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(k + 1, k + 1));
    const MatrixXd gram_inv_perm = r_inv * r_inv.transpose();
    const auto& perm = qr.colsPermutation();
    const MatrixXd gram_inv = perm * gram_inv_perm * perm.transpose();

    fit.std_errors.resize(k + 1);
    fit.t_values.resize(k + 1);
    fit.p_values.resize(k + 1);
    for (Index j = 0; j < k + 1; ++j) {
        if (a.df_residual == 0) {
            fit.std_errors(j) = fit.t_values(j) = fit.p_values(j) = nan;
            continue;
        }
        const double se = std::sqrt(a.residual_ms * std::max(0.0, gram_inv(j, j)));
        const double b = fit.coefficients(j);
        double t;
        if (se > 0.0)
            t = b / se;
        else
            t = b == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), b);
        fit.std_errors(j) = se;
        fit.t_values(j) = t;
        fit.p_values(j) = detail::two_sided_t_p(t, df_res);
    }

    const double y_sd = std::sqrt(a.total_ss / static_cast<double>(n));
    fit.standardized_betas.resize(k);
    for (Index j = 0; j < k; ++j) {
        const double x_sd =
            std::sqrt((X.col(j).array() - X.col(j).mean()).square().sum() / static_cast<double>(n));
        fit.standardized_betas(j) = fit.coefficients(j + 1) * x_sd / y_sd;
    }

    fit.durbin_watson = fit.residuals.squaredNorm() > 0.0 ? durbin_watson(fit.residuals) : nan;
    return fit;
}

inline VectorXd predict(const RegressionFit& fit, const MatrixXd& X) {
    if (X.cols() != fit.n_features())
        throw DataError("predict: expected " + std::to_string(fit.n_features()) + " columns, got " +
                        std::to_string(X.cols()));
    return (X * fit.slopes()).array() + fit.intercept();
}

struct StepwiseConfig {
    double p_drop = 0.05;
    double p_drop_tight = 0.035;
    double p_drop_loose = 0.10;
    std::size_t max_vars_before_tighten = 8;
    std::size_t min_vars_before_loosen = 2;

    void validate() const {
        if (!(0.0 < p_drop_tight && p_drop_tight < p_drop && p_drop < p_drop_loose &&
              p_drop_loose < 1.0))
            throw ConfigError("stepwise thresholds must satisfy 0 < tight < drop < loose < 1");
    }
};

enum class StepwisePhase { initial, tightened, loosened };

inline const char* to_string(StepwisePhase phase) {
    switch (phase) {
        case StepwisePhase::initial: return "initial";
        case StepwisePhase::tightened: return "tightened";
        case StepwisePhase::loosened: return "loosened";
    }
    return "?";
}

struct Elimination {
    std::string name;
    double p_value = 0.0;
};

struct StepwisePass {
    StepwisePhase phase = StepwisePhase::initial;
    double threshold = 0.0;
    std::vector<Elimination> eliminated;  // in elimination order
    std::vector<std::string> survivors;
};

struct StepwiseAudit {
    std::vector<StepwisePass> passes;

    double active_threshold() const { return passes.back().threshold; }

    std::size_t count(StepwisePhase phase) const {
        return static_cast<std::size_t>(std::count_if(
            passes.begin(), passes.end(), [&](const auto& p) { return p.phase == phase; }));
    }
};

struct StepwiseResult {
    RegressionFit fit;
    StepwiseAudit audit;
};

namespace detail {

struct PassOutcome {
    StepwisePass pass;
    std::optional<RegressionFit> fit;
};

inline PassOutcome backward_pass(const MatrixXd& X, const VectorXd& y,
                                 const std::vector<std::string>& names, double threshold,
                                 StepwisePhase phase) {
    std::vector<Index> active(names.size());
    std::iota(active.begin(), active.end(), Index{0});
    PassOutcome out;
    out.pass.phase = phase;
    out.pass.threshold = threshold;

    while (!active.empty()) {
        MatrixXd sub(X.rows(), static_cast<Index>(active.size()));
        std::vector<std::string> sub_names;
        for (std::size_t j = 0; j < active.size(); ++j) {
            sub.col(static_cast<Index>(j)) = X.col(active[j]);
            sub_names.push_back(names[static_cast<std::size_t>(active[j])]);
        }
        auto fit = ols_fit(sub, y, sub_names);

        // Highest p above threshold; on ties the later column goes.
        std::optional<std::size_t> worst;
        for (std::size_t j = 0; j < active.size(); ++j) {
            const double p = fit.p_values(static_cast<Index>(j) + 1);
            if (p > threshold && (!worst || p >= fit.p_values(static_cast<Index>(*worst) + 1)))
                worst = j;
        }
        if (!worst) {
            out.pass.survivors = std::move(sub_names);
            out.fit = std::move(fit);
            return out;
        }
        out.pass.eliminated.push_back(
            {sub_names[*worst], fit.p_values(static_cast<Index>(*worst) + 1)});
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(*worst));
    }
    return out;
}

}  // namespace detail

/// Backward elimination: all features enter, the single least significant
/// regressor above the active threshold is removed and the model refit
/// until none remains. The first pass uses `p_drop`; more than
/// `max_vars_before_tighten` survivors reruns from the full set with
/// `p_drop_tight`, at most `min_vars_before_loosen` survivors reruns with
/// `p_drop_loose`. The intercept is never eliminated.
inline StepwiseResult stepwise_fit(const MatrixXd& X, const VectorXd& y,
                                   const std::vector<std::string>& feature_names,
                                   const StepwiseConfig& config = {}) {
    config.validate();
    if (feature_names.empty()) throw DataError("stepwise_fit: no features");
    StepwiseAudit audit;
    auto outcome = detail::backward_pass(X, y, feature_names, config.p_drop, StepwisePhase::initial);
    audit.passes.push_back(outcome.pass);

    const std::size_t survivors = outcome.pass.survivors.size();
    if (survivors > config.max_vars_before_tighten) {
        outcome = detail::backward_pass(X, y, feature_names, config.p_drop_tight,
                                        StepwisePhase::tightened);
        audit.passes.push_back(outcome.pass);
    } else if (survivors <= config.min_vars_before_loosen) {
        outcome = detail::backward_pass(X, y, feature_names, config.p_drop_loose,
                                        StepwisePhase::loosened);
        audit.passes.push_back(outcome.pass);
    }

    if (!outcome.fit)
        throw EmptyModelError("stepwise_fit: every regressor was eliminated at p > " +
                              std::to_string(audit.active_threshold()));
    return {std::move(*outcome.fit), std::move(audit)};
}

}  // namespace stockfc
