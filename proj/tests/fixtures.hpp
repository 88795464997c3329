#pragma once

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stockfc/pipeline.hpp"
#include "stockfc/rng.hpp"

namespace fixture {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Independent component mixtures

struct Mixture {
    MatrixXd observed;  // samples x variables
    MatrixXd mixing;    // variables x sources
    MatrixXd sources;   // samples x sources
};

/// Sources: uniform, Laplace, centred exponential, binary. Columns of the
/// mixing matrix are standard normal; a little Gaussian sensor noise keeps
/// the observed covariance full rank when variables outnumber sources.
inline Mixture non_gaussian_mixture(Index n, Index n_sources, Index n_vars, std::uint64_t seed,
                                    double noise = 0.02) {
    stockfc::Rng rng(seed);
    Mixture m;
    m.sources.resize(n, n_sources);
    for (Index c = 0; c < n_sources; ++c)
        for (Index r = 0; r < n; ++r) {
            double v = 0.0;
            switch (c % 4) {
                case 0: v = rng.uniform(-std::sqrt(3.0), std::sqrt(3.0)); break;
                case 1: {
                    const double u = rng.uniform() - 0.5;
                    v = -std::copysign(std::log(1.0 - 2.0 * std::abs(u)), u) / std::sqrt(2.0);
                    break;
                }
                case 2: v = -std::log(1.0 - rng.uniform()) - 1.0; break;
                default: v = rng.uniform() < 0.5 ? -1.0 : 1.0; break;
            }
            m.sources(r, c) = v;
        }
    m.mixing.resize(n_vars, n_sources);
    for (Index i = 0; i < n_vars; ++i)
        for (Index j = 0; j < n_sources; ++j) m.mixing(i, j) = rng.normal();
    m.observed = m.sources * m.mixing.transpose();
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n_vars; ++c) m.observed(r, c) += noise * rng.normal();
    return m;
}

// ---------------------------------------------------------------------------
// Stepwise regression designs with prescribed t statistics
//
// With orthonormal columns orthogonal to the constant and residual scale
// sqrt(df), every slope has standard error 1, so b_j is its own t value.

struct StepwiseDesign {
    MatrixXd X;
    VectorXd y;
    std::vector<std::string> names;
};

inline double t_for_p(double p, double df) {
    const boost::math::students_t dist(df);
    return boost::math::quantile(boost::math::complement(dist, p / 2.0));
}

inline StepwiseDesign stepwise_design(Index n, const std::vector<double>& t_values,
                                      std::vector<std::string> names, std::uint64_t seed) {
    const auto k = static_cast<Index>(t_values.size());
    const auto design = oracle::exact_design(n, k, seed);
    const double df = static_cast<double>(n - k - 1);
    StepwiseDesign out;
    out.X = design.X;
    out.y = VectorXd::Constant(n, 100.0) + std::sqrt(df) * design.residual;
    for (Index j = 0; j < k; ++j) out.y += t_values[static_cast<std::size_t>(j)] * design.X.col(j);
    out.names = std::move(names);
    return out;
}

/// Six regressors; the last one sits at p = 0.066 in the full model.
inline StepwiseDesign income_fixture() {
    const Index n = 60;
    const double df = static_cast<double>(n - 7);
    return stepwise_design(n, {9.0, 7.5, 6.0, 8.0, 5.5, t_for_p(0.066, df)},
                           {"growth rates of industrial production", "inflation rate", "money supply 1",
                            "earning per share", "size of firm", "operating income to total sales"},
                           101);
}

/// Twelve regressors, nine predictive (one of them only at p ~ 0.042).
inline StepwiseDesign tighten_fixture() {
    const Index n = 80;
    // The weak regressor is judged once the three null ones are gone: the
    // residual sum of squares is unchanged but df grows by 3.
    const double df = static_cast<double>(n - 13);
    const double weak = t_for_p(0.042, df + 3.0) * std::sqrt(df / (df + 3.0));
    std::vector<double> t{9.0, 8.0, 7.0, 10.0, 6.5, 7.5, 8.5, 9.5, weak, 0.0, 0.0, 0.0};
    std::vector<std::string> names;
    for (int i = 1; i <= 12; ++i) names.push_back("x" + std::to_string(i));
    return stepwise_design(n, t, names, 202);
}

/// Four regressors, two strong, one at p ~ 0.07, one null.
inline StepwiseDesign loosen_fixture() {
    const Index n = 50;
    const double df = static_cast<double>(n - 5);
    const double weak = t_for_p(0.07, df + 1.0) * std::sqrt(df / (df + 1.0));
    return stepwise_design(n, {8.0, 6.0, weak, 0.0}, {"a", "b", "c", "d"}, 303);
}

// ---------------------------------------------------------------------------
// Pipeline configurations

inline stockfc::PipelineConfig synth_config(std::uint64_t seed, int companies = 100,
                                            int months = 84) {
    stockfc::PipelineConfig cfg;
    cfg.synth.n_companies = companies;
    cfg.synth.n_months = months;
    cfg.synth.nonlinear = true;
    cfg.set_seed(seed);
    return cfg;
}

}  // namespace fixture
