#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stockfc/error.hpp"

namespace stockfc {

using Eigen::Index;
using Eigen::VectorXd;

struct MetricsReport {
    std::string model_name;
    double mse = 0.0;
    double mape = 0.0;  // percent
    double r_squared = 0.0;
    std::size_t n = 0;
    std::size_t n_excluded_zero_actuals = 0;
};

/// MSE, MAPE (percent, rows with a zero actual excluded and counted) and
/// out-of-sample R^2 = 1 - SS_res / SS_tot. R^2 is not clamped and goes
/// negative for models worse than the actuals' mean.
inline MetricsReport evaluate(const VectorXd& predictions, const VectorXd& actuals,
                              const std::string& label) {
    if (predictions.size() != actuals.size())
        throw DataError("evaluate: predictions and actuals differ in length");
    if (actuals.size() < 2) throw DataError("evaluate: need at least two observations");
    if (!predictions.allFinite() || !actuals.allFinite())
        throw NumericalError("evaluate: non-finite predictions or actuals for " + label);

    const Index n = actuals.size();
    MetricsReport rep;
    rep.model_name = label;
    rep.n = static_cast<std::size_t>(n);
    const VectorXd err = actuals - predictions;
    rep.mse = err.squaredNorm() / static_cast<double>(n);

    double ape = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (actuals(i) == 0.0) {
            ++rep.n_excluded_zero_actuals;
            continue;
        }
        ape += std::abs(err(i)) / std::abs(actuals(i));
    }
    if (rep.n_excluded_zero_actuals == rep.n) throw DataError("evaluate: all actuals are zero; MAPE undefined");
    rep.mape = 100.0 * ape / static_cast<double>(rep.n - rep.n_excluded_zero_actuals);

    const double mean = actuals.mean();
    const double ss_tot = (actuals.array() - mean).square().sum();
    if (ss_tot == 0.0) throw DataError("evaluate: actuals have zero variance; R^2 undefined");
    rep.r_squared = 1.0 - err.squaredNorm() / ss_tot;
    return rep;
}

struct MetricDelta {
    std::string first;
    std::string second;
    double mse = 0.0;  // first - second
    double mape = 0.0;
    double r_squared = 0.0;
};

struct ComparisonReport {
    std::vector<MetricsReport> rows;     // input order
    std::vector<std::string> ranking;    // mse ascending, ties by label
    std::vector<MetricDelta> deltas;     // every pair (i < j) in input order
};

inline ComparisonReport compare(const std::vector<MetricsReport>& reports) {
    if (reports.size() < 2) throw DataError("compare: need at least two reports");
    std::set<std::string> labels;
    for (const auto& r : reports)
        if (!labels.insert(r.model_name).second)
            throw DataError("compare: duplicate model label '" + r.model_name + "'");

    ComparisonReport out;
    out.rows = reports;
    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (reports[a].mse != reports[b].mse) return reports[a].mse < reports[b].mse;
        return reports[a].model_name < reports[b].model_name;
    });
    for (auto i : order) out.ranking.push_back(reports[i].model_name);
    for (std::size_t i = 0; i < reports.size(); ++i)
        for (std::size_t j = i + 1; j < reports.size(); ++j)
            out.deltas.push_back({reports[i].model_name, reports[j].model_name,
                                  reports[i].mse - reports[j].mse, reports[i].mape - reports[j].mape,
                                  reports[i].r_squared - reports[j].r_squared});
    return out;
}

/// Aligned plain-text table, one row per model in ranking order.
inline std::string render_table(const ComparisonReport& report, const std::string& title = {}) {
    std::size_t width = 5;
    for (const auto& r : report.rows) width = std::max(width, r.model_name.size());
    std::ostringstream out;
    if (!title.empty()) out << title << '\n';
    char line[256];
    std::snprintf(line, sizeof(line), "%-*s  %14s  %10s  %10s  %6s\n", static_cast<int>(width), "model",
                  "MSE", "MAPE(%)", "R^2", "n");
    out << line;
    out << std::string(width + 48, '-') << '\n';
    for (const auto& name : report.ranking) {
        const auto it = std::find_if(report.rows.begin(), report.rows.end(),
                                     [&](const auto& r) { return r.model_name == name; });
        std::snprintf(line, sizeof(line), "%-*s  %14.4f  %10.4f  %10.4f  %6zu\n",
                      static_cast<int>(width), it->model_name.c_str(), it->mse, it->mape,
                      it->r_squared, it->n);
        out << line;
    }
    return out.str();
}

}  // namespace stockfc
