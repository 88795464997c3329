#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stockfc/catalog.hpp"
#include "stockfc/dataset.hpp"
#include "stockfc/error.hpp"
#include "stockfc/grnn.hpp"
#include "stockfc/ica.hpp"
#include "stockfc/json_io.hpp"
#include "stockfc/linreg.hpp"
#include "stockfc/metrics.hpp"
#include "stockfc/mlp.hpp"
#include "stockfc/panel.hpp"
#include "stockfc/synth.hpp"

namespace stockfc {

// ---------------------------------------------------------------------------
// Configuration
//
// Plain `key = value` lines, `#` comments, optional `[section]` headers that
// prefix the keys below them (`[grnn]` + `spread` is `grnn.spread`). Values
// may be wrapped in double quotes. Recognised keys:
//
//   seed                          master seed (default 7)
//   input                         panel CSV; relative paths resolve against
//                                 the config file's directory
//   synth.seed | n_companies | n_months | noise_scale | nonlinear
//   features.source               ica | paper-seven | list  (default paper-seven)
//   features.list                 comma-separated names (source = list)
//   features.k_min | k_max        ICA subset bounds (3, 7)
//   ica.n_components | tol | max_iter
//   split.test_fraction           chronological holdout (0.2)
//   stepwise.p_drop | p_drop_tight | p_drop_loose
//   stepwise.max_vars_before_tighten | min_vars_before_loosen
//   grnn.spread                   fixed spread (0.8326)
//   grnn.grid                     comma-separated spreads; enables search
//   grnn.validation_fraction      tail of the training set used by the search
//   mlp.hidden                    hidden units (14)
//   lm.lambda_init | lambda_up | lambda_down | max_epochs | grad_tol
//   output.dir                    artifact directory (default "out")
//
// `input` and any `synth.*` key are mutually exclusive; with neither, a
// default synthetic panel is generated.

enum class FeatureSource { ica, paper_seven, list };

inline const char* to_string(FeatureSource s) {
    switch (s) {
        case FeatureSource::ica: return "ica";
        case FeatureSource::paper_seven: return "paper-seven";
        case FeatureSource::list: return "list";
    }
    return "?";
}

struct PipelineConfig {
    std::uint64_t seed = 7;
    std::optional<std::filesystem::path> input;
    SynthConfig synth;
    bool synth_seed_set = false;

    FeatureSource feature_source = FeatureSource::paper_seven;
    std::vector<std::string> feature_list;
    std::size_t k_min = 3;
    std::size_t k_max = 7;
    IcaOptions ica;

    double test_fraction = 0.2;
    StepwiseConfig stepwise;

    double grnn_spread = kDefaultSpread;
    std::vector<double> spread_grid;
    double validation_fraction = 0.2;

    Index hidden_units = 14;
    LmConfig lm;

    std::filesystem::path output_dir = "out";

    /// Replaces the master seed and every seed derived from it.
    void set_seed(std::uint64_t s) {
        seed = s;
        if (!synth_seed_set) synth.seed = s;
        ica.seed = s;
        lm.seed = s;
    }

    void validate() const {
        if (!input) synth.validate();
        stepwise.validate();
        lm.validate();
        if (!(test_fraction > 0.0 && test_fraction < 1.0))
            throw ConfigError("split.test_fraction must lie in (0, 1)");
        if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
            throw ConfigError("grnn.validation_fraction must lie in (0, 1)");
        if (!(grnn_spread > 0.0)) throw ConfigError("grnn.spread must be > 0");
        for (double s : spread_grid)
            if (!(s > 0.0)) throw ConfigError("grnn.grid values must be > 0");
        if (hidden_units < 1) throw ConfigError("mlp.hidden must be >= 1");
        if (k_min < 1 || k_min > k_max) throw ConfigError("features.k_min/k_max out of order");
        if (feature_source == FeatureSource::list && feature_list.empty())
            throw ConfigError("features.source = list requires features.list");
        if (feature_source != FeatureSource::list && !feature_list.empty())
            throw ConfigError("features.list given but features.source is not 'list'");
    }
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

inline std::string unquote(std::string_view v) {
    v = trim(v);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    return std::string(v);
}

inline double config_real(const std::string& key, const std::string& v) {
    const auto parsed = parse_real(v);
    if (!parsed) throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    return *parsed;
}

inline std::uint64_t config_count(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
    return out;
}

inline bool config_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

inline std::vector<std::string> config_list(const std::string& v) {
    std::vector<std::string> out;
    for (auto field : split_fields(v)) {
        auto item = unquote(field);
        if (!item.empty()) out.push_back(std::move(item));
    }
    return out;
}

}  // namespace detail

/// Parses configuration text. `base_dir` anchors a relative `input` path.
inline PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
    std::map<std::string, std::string> kv;
    std::string section;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line(detail::trim(detail::strip_comment(raw)));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": bad section header");
            section = std::string(detail::trim(std::string_view(line).substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key(detail::trim(std::string_view(line).substr(0, eq)));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        if (!kv.emplace(key, detail::unquote(std::string_view(line).substr(eq + 1))).second)
            throw ConfigError("config: duplicate key '" + key + "'");
    }

    PipelineConfig cfg;
    std::set<std::string> used;
    const auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        used.insert(key);
        return it->second;
    };

    if (auto v = take("seed")) cfg.seed = detail::config_count("seed", *v);
    cfg.synth.seed = cfg.seed;
    cfg.ica.seed = cfg.seed;
    cfg.lm.seed = cfg.seed;

    if (auto v = take("input")) {
        std::filesystem::path p(*v);
        cfg.input = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    bool any_synth = false;
    if (auto v = take("synth.seed")) {
        cfg.synth.seed = detail::config_count("synth.seed", *v);
        cfg.synth_seed_set = true;
        any_synth = true;
    }
    if (auto v = take("synth.n_companies")) {
        cfg.synth.n_companies = static_cast<int>(detail::config_count("synth.n_companies", *v));
        any_synth = true;
    }
    if (auto v = take("synth.n_months")) {
        cfg.synth.n_months = static_cast<int>(detail::config_count("synth.n_months", *v));
        any_synth = true;
    }
    if (auto v = take("synth.noise_scale")) {
        cfg.synth.noise_scale = detail::config_real("synth.noise_scale", *v);
        any_synth = true;
    }
    if (auto v = take("synth.nonlinear")) {
        cfg.synth.nonlinear = detail::config_bool("synth.nonlinear", *v);
        any_synth = true;
    }
    if (cfg.input && any_synth) throw ConfigError("config: give either 'input' or synth.* keys, not both");

    if (auto v = take("features.source")) {
        if (*v == "ica")
            cfg.feature_source = FeatureSource::ica;
        else if (*v == "paper-seven")
            cfg.feature_source = FeatureSource::paper_seven;
        else if (*v == "list")
            cfg.feature_source = FeatureSource::list;
        else
            throw ConfigError("config: features.source must be ica, paper-seven or list");
    }
    if (auto v = take("features.list")) cfg.feature_list = detail::config_list(*v);
    if (auto v = take("features.k_min")) cfg.k_min = detail::config_count("features.k_min", *v);
    if (auto v = take("features.k_max")) cfg.k_max = detail::config_count("features.k_max", *v);
    if (auto v = take("ica.n_components"))
        cfg.ica.n_components = static_cast<Index>(detail::config_count("ica.n_components", *v));
    if (auto v = take("ica.tol")) cfg.ica.tol = detail::config_real("ica.tol", *v);
    if (auto v = take("ica.max_iter")) cfg.ica.max_iter = detail::config_count("ica.max_iter", *v);

    if (auto v = take("split.test_fraction")) cfg.test_fraction = detail::config_real("split.test_fraction", *v);

    if (auto v = take("stepwise.p_drop")) cfg.stepwise.p_drop = detail::config_real("stepwise.p_drop", *v);
    if (auto v = take("stepwise.p_drop_tight"))
        cfg.stepwise.p_drop_tight = detail::config_real("stepwise.p_drop_tight", *v);
    if (auto v = take("stepwise.p_drop_loose"))
        cfg.stepwise.p_drop_loose = detail::config_real("stepwise.p_drop_loose", *v);
    if (auto v = take("stepwise.max_vars_before_tighten"))
        cfg.stepwise.max_vars_before_tighten = detail::config_count("stepwise.max_vars_before_tighten", *v);
    if (auto v = take("stepwise.min_vars_before_loosen"))
        cfg.stepwise.min_vars_before_loosen = detail::config_count("stepwise.min_vars_before_loosen", *v);

    if (auto v = take("grnn.spread")) cfg.grnn_spread = detail::config_real("grnn.spread", *v);
    if (auto v = take("grnn.grid"))
        for (const auto& item : detail::config_list(*v))
            cfg.spread_grid.push_back(detail::config_real("grnn.grid", item));
    if (auto v = take("grnn.validation_fraction"))
        cfg.validation_fraction = detail::config_real("grnn.validation_fraction", *v);

    if (auto v = take("mlp.hidden")) cfg.hidden_units = static_cast<Index>(detail::config_count("mlp.hidden", *v));
    if (auto v = take("lm.lambda_init")) cfg.lm.lambda_init = detail::config_real("lm.lambda_init", *v);
    if (auto v = take("lm.lambda_up")) cfg.lm.lambda_up = detail::config_real("lm.lambda_up", *v);
    if (auto v = take("lm.lambda_down")) cfg.lm.lambda_down = detail::config_real("lm.lambda_down", *v);
    if (auto v = take("lm.max_epochs")) cfg.lm.max_epochs = detail::config_count("lm.max_epochs", *v);
    if (auto v = take("lm.grad_tol")) cfg.lm.grad_tol = detail::config_real("lm.grad_tol", *v);

    if (auto v = take("output.dir")) cfg.output_dir = *v;

    for (const auto& [key, value] : kv)
        if (!used.count(key)) throw ConfigError("config: unknown key '" + key + "'");
    cfg.validate();
    return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path.string());
    return parse_config(in, path.parent_path());
}

// ---------------------------------------------------------------------------
// Pipeline steps

struct PipelineLog {
    bool verbose = false;
    void operator()(const std::string& msg) const {
        if (verbose) std::cerr << "[stockfc] " << msg << '\n';
    }
};

inline Panel load_data(const PipelineConfig& cfg, const PipelineLog& log = {}) {
    const auto& catalog = default_catalog();
    if (cfg.input) {
        auto panel = load_panel(*cfg.input, catalog);
        log("loaded " + std::to_string(panel.observations.size()) + " observations from " +
            cfg.input->string() + " (" + std::to_string(panel.dropped_rows) + " rows dropped)");
        return panel;
    }
    log("generating synthetic panel (seed " + std::to_string(cfg.synth.seed) + ")");
    return synth_generate(cfg.synth, catalog);
}

struct Selection {
    FeatureSource source = FeatureSource::paper_seven;
    std::vector<std::string> names;  // catalog order
    std::optional<VariableSubset> subset;
    std::optional<IcaResult> ica;

    json to_json() const {
        json j = {{"source", stockfc::to_string(source)}, {"features", names}};
        if (subset) {
            j["ranked"] = stockfc::to_json(*subset);
        }
        if (ica) {
            j["ica"] = {{"n_components", ica->unmixing.rows()},
                        {"n_iterations", ica->n_iterations},
                        {"converged", ica->converged}};
        }
        return j;
    }
};

inline Selection select_features(const PipelineConfig& cfg, const Panel& panel, const PipelineLog& log = {}) {
    const auto& catalog = default_catalog();
    Selection sel;
    sel.source = cfg.feature_source;
    switch (cfg.feature_source) {
        case FeatureSource::paper_seven:
            sel.names = paper_seven();
            break;
        case FeatureSource::list:
            sel.names = catalog.in_catalog_order(cfg.feature_list);
            break;
        case FeatureSource::ica: {
            const auto full = lag_align(panel, panel.variable_names);
            const auto split = chronological_split(full, cfg.test_fraction);
            auto [standardized, scaler] = standardize(split.train);
            const auto white = whiten(standardized.features, standardized.feature_names);
            auto ica = fastica(white, cfg.ica);
            auto subset = select_variables(ica, standardized.feature_names, cfg.k_min, cfg.k_max);
            log("ICA: " + std::to_string(ica.unmixing.rows()) + " components, " +
                (ica.converged ? "converged" : "not converged") + " after " +
                std::to_string(ica.n_iterations) + " iterations");
            sel.names = catalog.in_catalog_order(subset.selected_names);
            sel.subset = std::move(subset);
            sel.ica = std::move(ica);
            break;
        }
    }
    for (const auto& name : sel.names)
        if (!panel.variable_index(name)) throw DataError("selected variable not in panel: " + name);
    return sel;
}

/// Reads the feature list back from a selected_variables.json artifact.
inline std::vector<std::string> load_selection(const std::filesystem::path& path) {
    const auto j = read_json(path);
    try {
        return default_catalog().in_catalog_order(j.at("features").get<std::vector<std::string>>());
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

struct PreparedData {
    SupervisedSet all;
    Split split;
};

inline PreparedData prepare(const PipelineConfig& cfg, const Panel& panel, const std::vector<std::string>& features) {
    PreparedData d;
    d.all = lag_align(panel, features);
    d.split = chronological_split(d.all, cfg.test_fraction);
    return d;
}

struct TrainTestMetrics {
    MetricsReport train;
    MetricsReport test;

    json to_json() const { return {{"train", stockfc::to_json(train)}, {"test", stockfc::to_json(test)}}; }

    static TrainTestMetrics from_json(const json& j) {
        return {metrics_from_json(j.at("train")), metrics_from_json(j.at("test"))};
    }
};

inline const std::string kLinregLabel = "linear-regression";
inline const std::string kGrnnLabel = "grnn";
inline const std::string kMlpUntrainedLabel = "mlp-untrained";
inline const std::string kMlpTrainedLabel = "mlp-lm";

struct LinregOutcome {
    StepwiseResult result;
    TrainTestMetrics metrics;
};

inline MatrixXd select_columns(const SupervisedSet& set, const std::vector<std::string>& names) {
    MatrixXd out(set.size(), static_cast<Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        const auto it = std::find(set.feature_names.begin(), set.feature_names.end(), names[j]);
        out.col(static_cast<Index>(j)) = set.features.col(it - set.feature_names.begin());
    }
    return out;
}

inline LinregOutcome fit_linreg(const PipelineConfig& cfg, const Split& split) {
    auto result = stepwise_fit(split.train.features, split.train.targets, split.train.feature_names, cfg.stepwise);
    const auto& kept = result.fit.feature_names;
    const VectorXd train_pred = predict(result.fit, select_columns(split.train, kept));
    const VectorXd test_pred = predict(result.fit, select_columns(split.test, kept));
    return {std::move(result),
            {evaluate(train_pred, split.train.targets, kLinregLabel),
             evaluate(test_pred, split.test.targets, kLinregLabel)}};
}

struct GrnnOutcome {
    GrnnModel model;
    std::optional<SpreadSearchResult> search;
    TrainTestMetrics metrics;
};

inline GrnnOutcome fit_grnn(const PipelineConfig& cfg, const Split& split) {
    GrnnOutcome out;
    double spread = cfg.grnn_spread;
    if (!cfg.spread_grid.empty()) {
        const auto inner = chronological_split(split.train, cfg.validation_fraction);
        out.search = spread_search(inner.train, inner.test, cfg.spread_grid);
        spread = out.search->best_spread;
    }
    out.model = grnn_build(split.train, spread);
    out.metrics = {evaluate(grnn_predict(out.model, split.train.features), split.train.targets, kGrnnLabel),
                   evaluate(grnn_predict(out.model, split.test.features), split.test.targets, kGrnnLabel)};
    return out;
}

struct MlpOutcome {
    MlpModel untrained;
    MlpModel trained;
    TrainHistory history;
    ScalerParams scaler;
    TrainTestMetrics untrained_metrics;
    TrainTestMetrics trained_metrics;
};

/// 7-14-1 style network on standardized features, raw price targets.
inline MlpOutcome fit_mlp(const PipelineConfig& cfg, const Split& split) {
    MlpOutcome out;
    out.scaler = fit_scaler(split.train.features, split.train.feature_names, ConstantColumns::unit_scale);
    const MatrixXd x_train = out.scaler.transform(split.train.features);
    const MatrixXd x_test = out.scaler.transform(split.test.features);
    out.untrained = mlp_init({split.train.width(), cfg.hidden_units, 1}, cfg.lm.seed);
    auto trained = train_lm(out.untrained, x_train, split.train.targets, cfg.lm);
    out.trained = std::move(trained.model);
    out.history = std::move(trained.history);
    out.untrained_metrics = {
        evaluate(predict_batch(out.untrained, x_train), split.train.targets, kMlpUntrainedLabel),
        evaluate(predict_batch(out.untrained, x_test), split.test.targets, kMlpUntrainedLabel)};
    out.trained_metrics = {evaluate(predict_batch(out.trained, x_train), split.train.targets, kMlpTrainedLabel),
                           evaluate(predict_batch(out.trained, x_test), split.test.targets, kMlpTrainedLabel)};
    return out;
}

struct Comparison {
    ComparisonReport train;
    ComparisonReport test;

    json to_json() const { return {{"train", stockfc::to_json(train)}, {"test", stockfc::to_json(test)}}; }

    std::string render() const {
        return render_table(test, "Out-of-sample (test) comparison") + "\n" +
               render_table(train, "In-sample (train) comparison");
    }
};

inline Comparison compare_models(const std::vector<TrainTestMetrics>& models) {
    std::vector<MetricsReport> train, test;
    for (const auto& m : models) {
        train.push_back(m.train);
        test.push_back(m.test);
    }
    return {compare(train), compare(test)};
}

// ---------------------------------------------------------------------------
// Artifact writers

namespace artifact {
inline constexpr const char* kPanel = "panel.csv";
inline constexpr const char* kSynthTruth = "synth_truth.json";
inline constexpr const char* kSelection = "selected_variables.json";
inline constexpr const char* kDataset = "dataset.json";
inline constexpr const char* kLinregFit = "linreg_fit.json";
inline constexpr const char* kLinregMetrics = "linreg_metrics.json";
inline constexpr const char* kGrnnModel = "grnn_model.json";
inline constexpr const char* kGrnnMetrics = "grnn_metrics.json";
inline constexpr const char* kMlpModel = "mlp_model.json";
inline constexpr const char* kMlpHistory = "mlp_history.csv";
inline constexpr const char* kMlpMetrics = "mlp_metrics.json";
inline constexpr const char* kComparisonJson = "comparison.json";
inline constexpr const char* kComparisonText = "comparison.txt";
}  // namespace artifact

inline std::filesystem::path ensure_output_dir(const PipelineConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.output_dir))
        throw ConfigError("output directory not writable: " + cfg.output_dir.string());
    return cfg.output_dir;
}

inline void write_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed: " + path.string());
}

inline json dataset_summary(const Panel& panel, const PreparedData& d) {
    return {{"observations", panel.observations.size()},
            {"dropped_rows", panel.dropped_rows},
            {"companies", panel.companies().size()},
            {"features", d.all.feature_names},
            {"aligned_rows", d.all.size()},
            {"train_rows", d.split.train.size()},
            {"test_rows", d.split.test.size()}};
}

inline void write_linreg(const LinregOutcome& o, const std::filesystem::path& dir) {
    json fit = to_json(o.result.fit);
    fit["stepwise"] = to_json(o.result.audit);
    write_json(fit, dir / artifact::kLinregFit);
    write_json(o.metrics.to_json(), dir / artifact::kLinregMetrics);
}

inline void write_grnn(const GrnnOutcome& o, const std::filesystem::path& dir) {
    json model = to_json(o.model);
    if (o.search) {
        json grid = json::array();
        for (const auto& [s, mse] : o.search->validation_mse) grid.push_back({{"spread", s}, {"mse", mse}});
        model["spread_search"] = {{"best_spread", o.search->best_spread}, {"grid", std::move(grid)}};
    }
    write_json(model, dir / artifact::kGrnnModel);
    write_json(o.metrics.to_json(), dir / artifact::kGrnnMetrics);
}

inline void write_mlp(const MlpOutcome& o, const std::filesystem::path& dir) {
    json model = to_json(o.trained);
    model["input_scaler"] = to_json(o.scaler);
    model["history"] = to_json(o.history);
    write_json(model, dir / artifact::kMlpModel);
    emit_error_curve(o.history, dir / artifact::kMlpHistory);
    write_json({{"untrained", o.untrained_metrics.to_json()}, {"trained", o.trained_metrics.to_json()}},
               dir / artifact::kMlpMetrics);
}

inline void write_comparison(const Comparison& c, const std::filesystem::path& dir) {
    write_json(c.to_json(), dir / artifact::kComparisonJson);
    write_text(c.render(), dir / artifact::kComparisonText);
}

/// Results of a full run, returned for callers that want them in memory.
struct PipelineResult {
    Selection selection;
    PreparedData data;
    LinregOutcome linreg;
    GrnnOutcome grnn;
    MlpOutcome mlp;
    Comparison comparison;
};

/// Select variables, fit the stepwise regression, build the GRNN, train
/// the LM network and compare them. When `write` is set every artifact is
/// written to the output directory.
inline PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineLog& log = {}, bool write = true) {
    cfg.validate();
    const auto dir = write ? ensure_output_dir(cfg) : std::filesystem::path{};
    const auto panel = load_data(cfg, log);

    auto selection = select_features(cfg, panel, log);
    log("features: " + std::to_string(selection.names.size()) + " (" + to_string(selection.source) + ")");
    auto data = prepare(cfg, panel, selection.names);
    log("rows: " + std::to_string(data.split.train.size()) + " train, " + std::to_string(data.split.test.size()) +
        " test");

    auto linreg = fit_linreg(cfg, data.split);
    log("stepwise regression kept " + std::to_string(linreg.result.fit.n_features()) + " variables");
    auto grnn = fit_grnn(cfg, data.split);
    log("GRNN spread " + format_real(grnn.model.spread));
    auto mlp = fit_mlp(cfg, data.split);
    log("LM training ran " + std::to_string(mlp.history.epochs.size()) + " epochs");

    auto comparison = compare_models({grnn.metrics, linreg.metrics, mlp.untrained_metrics, mlp.trained_metrics});

    if (write) {
        write_json(selection.to_json(), dir / artifact::kSelection);
        write_json(dataset_summary(panel, data), dir / artifact::kDataset);
        write_linreg(linreg, dir);
        write_grnn(grnn, dir);
        write_mlp(mlp, dir);
        write_comparison(comparison, dir);
    }
    return {std::move(selection), std::move(data), std::move(linreg), std::move(grnn), std::move(mlp),
            std::move(comparison)};
}

}  // namespace stockfc
