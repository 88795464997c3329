#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "stockfc/dataset.hpp"
#include "stockfc/error.hpp"

namespace stockfc {

inline constexpr double kDefaultSpread = 0.8326;

/// General regression neural network (Specht). The pattern layer is the set
/// of stored exemplars; the summation layer forms the kernel-weighted sum of
/// targets and the sum of weights; the output layer divides them.
///
/// Exemplars are stored standardized. Queries arrive in raw units and are
/// passed through `scaler` first, so a single isotropic spread applies across
/// mixed-unit variables.
struct GrnnModel {
    std::vector<std::string> feature_names;
    MatrixXd exemplars;  // n x d, standardized
    VectorXd targets;
    double spread = kDefaultSpread;
    ScalerParams scaler;

    Index size() const { return targets.size(); }
    Index width() const { return exemplars.cols(); }
};

/// One-shot storage of the training set. Columns that are constant across
/// the exemplars keep scale 1, so a single exemplar is a valid model.
inline GrnnModel grnn_build(const SupervisedSet& train, double spread, ScalerParams scaler) {
    if (train.empty()) throw DataError("grnn_build: empty training set");
    if (!(spread > 0.0) || !std::isfinite(spread))
        throw DataError("grnn_build: spread must be finite and positive");
    if (!train.features.allFinite() || !train.targets.allFinite())
        throw DataError("grnn_build: non-finite training data");
    GrnnModel model;
    model.feature_names = train.feature_names;
    model.scaler = std::move(scaler);
    model.exemplars = model.scaler.transform(train.features);
    model.targets = train.targets;
    model.spread = spread;
    return model;
}

inline GrnnModel grnn_build(const SupervisedSet& train, double spread = kDefaultSpread) {
    if (train.empty()) throw DataError("grnn_build: empty training set");
    return grnn_build(train, spread,
                      fit_scaler(train.features, train.feature_names, ConstantColumns::unit_scale));
}

/// Kernel-weighted mean of the stored targets. Squared distances are shifted
/// by their minimum before exponentiation, so the nearest exemplar always has
/// weight 1 and the denominator never underflows.
inline double grnn_predict(const GrnnModel& model, const VectorXd& x) {
    if (x.size() != model.width())
        throw DataError("grnn_predict: expected " + std::to_string(model.width()) +
                        " features, got " + std::to_string(x.size()));
    const VectorXd z = model.scaler.transform(x);
    const VectorXd d2 = (model.exemplars.rowwise() - z.transpose()).rowwise().squaredNorm();
    const double shift = d2.minCoeff();
    const double inv_two_var = 1.0 / (2.0 * model.spread * model.spread);
    double num = 0.0;
    double den = 0.0;
    for (Index i = 0; i < d2.size(); ++i) {
        const double w = std::exp(-(d2(i) - shift) * inv_two_var);
        num += w * model.targets(i);
        den += w;
    }
    // The quotient is a convex combination; clamp away last-ulp excursions.
    return std::clamp(num / den, model.targets.minCoeff(), model.targets.maxCoeff());
}

inline VectorXd grnn_predict(const GrnnModel& model, const MatrixXd& X) {
    VectorXd out(X.rows());
    for (Index r = 0; r < X.rows(); ++r) out(r) = grnn_predict(model, VectorXd(X.row(r).transpose()));
    return out;
}

struct SpreadSearchResult {
    double best_spread = 0.0;
    std::vector<std::pair<double, double>> validation_mse;  // (spread, mse) in grid order
};

/// Validation-MSE grid search. Ties go to the smallest spread.
inline SpreadSearchResult spread_search(const SupervisedSet& train, const SupervisedSet& val,
                                        const std::vector<double>& grid) {
    if (grid.empty()) throw DataError("spread_search: empty grid");
    if (val.empty()) throw DataError("spread_search: empty validation set");
    for (double s : grid)
        if (!(s > 0.0) || !std::isfinite(s))
            throw DataError("spread_search: grid values must be finite and positive");

    SpreadSearchResult result;
    double best_mse = 0.0;
    for (double spread : grid) {
        const auto model = grnn_build(train, spread);
        const VectorXd pred = grnn_predict(model, val.features);
        const double mse = (pred - val.targets).squaredNorm() / static_cast<double>(val.size());
        result.validation_mse.emplace_back(spread, mse);
        const bool better = result.validation_mse.size() == 1 || mse < best_mse ||
                            (mse == best_mse && spread < result.best_spread);
        if (better) {
            best_mse = mse;
            result.best_spread = spread;
        }
    }
    return result;
}

}  // namespace stockfc
