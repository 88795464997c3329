#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "stockfc/dataset.hpp"
#include "stockfc/error.hpp"
#include "stockfc/grnn.hpp"
#include "stockfc/ica.hpp"
#include "stockfc/linreg.hpp"
#include "stockfc/metrics.hpp"
#include "stockfc/mlp.hpp"
#include "stockfc/panel.hpp"
#include "stockfc/synth.hpp"

// JSON views of the model and report types. NaN and infinite values are
// written as null.

namespace stockfc {

using nlohmann::json;

namespace detail {

inline json to_json_vector(const VectorXd& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline json to_json_matrix(const MatrixXd& m) {
    json out = json::array();
    for (Index r = 0; r < m.rows(); ++r) out.push_back(to_json_vector(m.row(r).transpose()));
    return out;
}

inline VectorXd vector_from_json(const json& j) {
    VectorXd v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j.at(i).get<double>();
    return v;
}

inline MatrixXd matrix_from_json(const json& j, Index cols) {
    MatrixXd m(static_cast<Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (static_cast<Index>(j.at(r).size()) != cols) throw DataError("ragged matrix in JSON");
        for (Index c = 0; c < cols; ++c) m(static_cast<Index>(r), c) = j.at(r).at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

}  // namespace detail

inline json to_json(const ScalerParams& s) {
    return {{"mean", detail::to_json_vector(s.mean)}, {"stddev", detail::to_json_vector(s.stddev)}};
}

inline ScalerParams scaler_from_json(const json& j) {
    return {detail::vector_from_json(j.at("mean")), detail::vector_from_json(j.at("stddev"))};
}

/// Model summary, ANOVA and coefficient table.
inline json to_json(const RegressionFit& fit) {
    const auto& a = fit.anova;
    json coefficients = json::array();
    for (Index j = 0; j < fit.coefficients.size(); ++j) {
        json row = {{"name", j == 0 ? std::string("(constant)") : fit.feature_names[static_cast<std::size_t>(j - 1)]},
                    {"b", fit.coefficients(j)},
                    {"std_error", fit.std_errors(j)},
                    {"beta", j == 0 ? json(nullptr) : json(fit.standardized_betas(j - 1))},
                    {"t", fit.t_values(j)},
                    {"sig", fit.p_values(j)}};
        coefficients.push_back(std::move(row));
    }
    return {
        {"model_summary",
         {{"r", fit.r},
          {"r_squared", fit.r_squared},
          {"adj_r_squared", fit.adj_r_squared},
          {"std_error_estimate", fit.std_error_estimate},
          {"durbin_watson", fit.durbin_watson},
          {"n", fit.n_observations()}}},
        {"anova",
         {{"regression",
           {{"sum_squares", a.regression_ss}, {"df", a.df_regression}, {"mean_square", a.regression_ms},
            {"f", a.f_statistic}, {"sig", a.f_p_value}}},
          {"residual", {{"sum_squares", a.residual_ss}, {"df", a.df_residual}, {"mean_square", a.residual_ms}}},
          {"total", {{"sum_squares", a.total_ss}, {"df", a.df_total}}}}},
        {"coefficients", std::move(coefficients)},
    };
}

inline json to_json(const StepwiseAudit& audit) {
    json passes = json::array();
    for (const auto& p : audit.passes) {
        json eliminated = json::array();
        for (const auto& e : p.eliminated) eliminated.push_back({{"name", e.name}, {"p_value", e.p_value}});
        passes.push_back({{"phase", to_string(p.phase)},
                          {"threshold", p.threshold},
                          {"eliminated", std::move(eliminated)},
                          {"survivors", p.survivors}});
    }
    return {{"passes", std::move(passes)}, {"active_threshold", audit.active_threshold()}};
}

inline json to_json(const GrnnModel& m) {
    return {{"feature_names", m.feature_names},
            {"spread", m.spread},
            {"scaler", to_json(m.scaler)},
            {"exemplars", detail::to_json_matrix(m.exemplars)},
            {"targets", detail::to_json_vector(m.targets)}};
}

inline GrnnModel grnn_from_json(const json& j) {
    GrnnModel m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.spread = j.at("spread").get<double>();
    m.scaler = scaler_from_json(j.at("scaler"));
    m.exemplars = detail::matrix_from_json(j.at("exemplars"), static_cast<Index>(m.feature_names.size()));
    m.targets = detail::vector_from_json(j.at("targets"));
    if (m.targets.size() != m.exemplars.rows() || m.targets.size() == 0 || !(m.spread > 0.0))
        throw DataError("invalid GRNN model JSON");
    return m;
}

inline json to_json(const MlpModel& m) {
    return {{"layer_sizes", {m.layer_sizes[0], m.layer_sizes[1], m.layer_sizes[2]}},
            {"hidden_activation", "logistic"},
            {"output_activation", "identity"},
            {"hidden_weights", detail::to_json_matrix(m.hidden_weights)},
            {"hidden_bias", detail::to_json_vector(m.hidden_bias)},
            {"output_weights", detail::to_json_vector(m.output_weights)},
            {"output_bias", m.output_bias}};
}

inline MlpModel mlp_from_json(const json& j) {
    const auto sizes = j.at("layer_sizes").get<std::vector<Index>>();
    auto m = mlp_init(sizes, 0);
    m.hidden_weights = detail::matrix_from_json(j.at("hidden_weights"), m.n_inputs());
    m.hidden_bias = detail::vector_from_json(j.at("hidden_bias"));
    m.output_weights = detail::vector_from_json(j.at("output_weights"));
    m.output_bias = j.at("output_bias").get<double>();
    if (m.hidden_weights.rows() != m.n_hidden() || m.hidden_bias.size() != m.n_hidden() ||
        m.output_weights.size() != m.n_hidden())
        throw DataError("invalid MLP model JSON");
    return m;
}

inline json to_json(const TrainHistory& h) {
    json epochs = json::array();
    for (const auto& e : h.epochs)
        epochs.push_back({{"epoch", e.epoch}, {"mse", e.mse}, {"lambda", e.lambda}, {"accepted", e.accepted}});
    return {{"initial_mse", h.initial_mse}, {"converged", h.converged}, {"epochs", std::move(epochs)}};
}

inline json to_json(const MetricsReport& r) {
    return {{"model", r.model_name},
            {"mse", r.mse},
            {"mape", r.mape},
            {"r_squared", r.r_squared},
            {"n", r.n},
            {"n_excluded_zero_actuals", r.n_excluded_zero_actuals}};
}

inline MetricsReport metrics_from_json(const json& j) {
    MetricsReport r;
    r.model_name = j.at("model").get<std::string>();
    r.mse = j.at("mse").get<double>();
    r.mape = j.at("mape").get<double>();
    r.r_squared = j.at("r_squared").get<double>();
    r.n = j.at("n").get<std::size_t>();
    r.n_excluded_zero_actuals = j.value("n_excluded_zero_actuals", std::size_t{0});
    return r;
}

inline json to_json(const ComparisonReport& c) {
    json rows = json::array();
    for (const auto& r : c.rows) rows.push_back(to_json(r));
    json deltas = json::array();
    for (const auto& d : c.deltas)
        deltas.push_back({{"first", d.first},
                          {"second", d.second},
                          {"mse", d.mse},
                          {"mape", d.mape},
                          {"r_squared", d.r_squared}});
    return {{"rows", std::move(rows)}, {"ranking", c.ranking}, {"deltas", std::move(deltas)}};
}

inline json to_json(const VariableSubset& s) {
    return {{"selected", s.selected_names}, {"scores", s.scores}};
}

inline json to_json(const SynthTruth& t) {
    return {{"intercept", t.intercept},
            {"drivers", t.drivers},
            {"coefficients", t.coefficients},
            {"nonlinear", t.nonlinear}};
}

/// Writes `epoch,mse,lambda,accepted`, one row per epoch in ascending order.
inline void emit_error_curve(const TrainHistory& history, std::ostream& out) {
    if (history.epochs.empty()) throw DataError("emit_error_curve: empty history");
    out << "epoch,mse,lambda,accepted\n";
    for (const auto& e : history.epochs)
        out << e.epoch << ',' << format_real(e.mse) << ',' << format_real(e.lambda) << ','
            << (e.accepted ? 1 : 0) << '\n';
}

inline void emit_error_curve(const TrainHistory& history, const std::filesystem::path& path) {
    if (history.epochs.empty()) throw DataError("emit_error_curve: empty history");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write error curve: " + path.string());
    emit_error_curve(history, out);
    if (!out) throw DataError("write failed: " + path.string());
}

inline void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed: " + path.string());
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace stockfc
