#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "stockfc/error.hpp"
#include "stockfc/panel.hpp"

namespace stockfc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Lag-aligned regression rows: features observed at month t-1 paired with
/// the price at month t. Row i is (companies[i], months[i]) where months[i]
/// is t.
struct SupervisedSet {
    std::vector<std::string> feature_names;
    std::vector<std::string> companies;
    std::vector<int> months;
    MatrixXd features;  // rows x feature_names.size()
    VectorXd targets;

    Index size() const { return targets.size(); }
    Index width() const { return static_cast<Index>(feature_names.size()); }
    bool empty() const { return size() == 0; }

    SupervisedSet subset(const std::vector<Index>& rows) const {
        SupervisedSet out;
        out.feature_names = feature_names;
        out.features.resize(static_cast<Index>(rows.size()), width());
        out.targets.resize(static_cast<Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Index r = rows[i];
            const auto row = static_cast<Index>(i);
            out.companies.push_back(companies[static_cast<std::size_t>(r)]);
            out.months.push_back(months[static_cast<std::size_t>(r)]);
            out.features.row(row) = features.row(r);
            out.targets(row) = targets(r);
        }
        return out;
    }

    void validate() const {
        const auto n = static_cast<std::size_t>(size());
        if (companies.size() != n || months.size() != n || features.rows() != size())
            throw DataError("supervised set columns have inconsistent lengths");
        if (features.cols() != width())
            throw DataError("feature matrix width does not match feature names");
    }
};

/// Builds one row per (company, t) for which month t-1 is also observed.
/// Rows come out ordered by (company, t).
inline SupervisedSet lag_align(const Panel& panel, const std::vector<std::string>& features) {
    if (features.empty()) throw DataError("lag_align: empty feature list");
    std::vector<std::size_t> cols;
    for (const auto& name : features) {
        const auto idx = panel.variable_index(name);
        if (!idx) throw DataError("lag_align: variable not in panel: " + name);
        cols.push_back(*idx);
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (lagged obs, current obs)
    const auto& obs = panel.observations;
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (obs[i].company == obs[i - 1].company && obs[i].month == obs[i - 1].month + 1)
            pairs.emplace_back(i - 1, i);
    }
    if (pairs.empty()) throw DataError("lag_align: no alignable (company, month) rows");

    SupervisedSet set;
    set.feature_names = features;
    set.features.resize(static_cast<Index>(pairs.size()), static_cast<Index>(cols.size()));
    set.targets.resize(static_cast<Index>(pairs.size()));
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        const auto& prev = obs[pairs[r].first];
        const auto& cur = obs[pairs[r].second];
        set.companies.push_back(cur.company);
        set.months.push_back(cur.month);
        for (std::size_t c = 0; c < cols.size(); ++c)
            set.features(static_cast<Index>(r), static_cast<Index>(c)) = prev.values[cols[c]];
        set.targets(static_cast<Index>(r)) = cur.price;
    }
    return set;
}

/// Per-feature z-score parameters (population standard deviation).
struct ScalerParams {
    VectorXd mean;
    VectorXd stddev;

    static ScalerParams identity(Index width) {
        return {VectorXd::Zero(width), VectorXd::Ones(width)};
    }

    Index width() const { return mean.size(); }

    MatrixXd transform(const MatrixXd& x) const {
        check_width(x.cols());
        return (x.rowwise() - mean.transpose()).array().rowwise() / stddev.transpose().array();
    }

    VectorXd transform(const VectorXd& x) const {
        check_width(x.size());
        return (x - mean).cwiseQuotient(stddev);
    }

    MatrixXd inverse(const MatrixXd& z) const {
        check_width(z.cols());
        return (z.array().rowwise() * stddev.transpose().array()).matrix().rowwise() +
               mean.transpose();
    }

private:
    void check_width(Index cols) const {
        if (cols != width()) throw DataError("scaler width does not match data width");
    }
};

enum class ConstantColumns {
    reject,      // throw DataError naming the column
    unit_scale,  // keep the column centred with scale 1
};

inline ScalerParams fit_scaler(const MatrixXd& x, const std::vector<std::string>& names,
                               ConstantColumns policy = ConstantColumns::reject) {
    if (x.rows() == 0) throw DataError("cannot fit scaler on an empty matrix");
    const auto n = static_cast<double>(x.rows());
    ScalerParams params;
    params.mean = x.colwise().sum().transpose() / n;
    params.stddev.resize(x.cols());
    for (Index c = 0; c < x.cols(); ++c) {
        const double var = (x.col(c).array() - params.mean(c)).square().sum() / n;
        double sd = std::sqrt(var);
        // Anything this small relative to the column's magnitude is roundoff.
        const double floor = 1e-12 * std::max(1.0, std::abs(params.mean(c)));
        if (!(sd > floor)) {
            if (policy == ConstantColumns::reject) {
                const auto label = static_cast<std::size_t>(c) < names.size()
                                       ? names[static_cast<std::size_t>(c)]
                                       : "#" + std::to_string(c);
                throw DataError("constant column cannot be standardized: " + label);
            }
            sd = 1.0;
        }
        params.stddev(c) = sd;
    }
    return params;
}

inline SupervisedSet apply_scaler(SupervisedSet set, const ScalerParams& params) {
    set.features = params.transform(set.features);
    return set;
}

/// Z-scores every feature column; targets are left in price units.
inline std::pair<SupervisedSet, ScalerParams> standardize(const SupervisedSet& set) {
    auto params = fit_scaler(set.features, set.feature_names);
    return {apply_scaler(set, params), std::move(params)};
}

struct Split {
    SupervisedSet train;
    SupervisedSet test;
};

/// Holds out the ceil(n * test_fraction) latest rows, ordering by month and
/// then company identifier. Both halves keep the input's row order.
inline Split chronological_split(const SupervisedSet& set, double test_fraction) {
    if (set.empty()) throw DataError("chronological_split: empty set");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw DataError("chronological_split: test fraction must lie in (0, 1)");
    const Index n = set.size();
    const auto n_test = static_cast<Index>(std::ceil(static_cast<double>(n) * test_fraction));
    if (n_test >= n) throw DataError("chronological_split: fraction leaves an empty training set");

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const auto ia = static_cast<std::size_t>(a);
        const auto ib = static_cast<std::size_t>(b);
        return std::tie(set.months[ia], set.companies[ia]) <
               std::tie(set.months[ib], set.companies[ib]);
    });
    std::vector<bool> is_test(static_cast<std::size_t>(n), false);
    for (Index i = n - n_test; i < n; ++i) is_test[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

    std::vector<Index> train_rows, test_rows;
    for (Index i = 0; i < n; ++i)
        (is_test[static_cast<std::size_t>(i)] ? test_rows : train_rows).push_back(i);
    return {set.subset(train_rows), set.subset(test_rows)};
}

}  // namespace stockfc
