// stockfc: command-line driver for the forecasting pipeline.
//
//   stockfc run        --config cfg.toml [--seed N] [--out DIR] [--verbose]
//   stockfc synth      write the configured synthetic panel as CSV
//   stockfc select     variable selection only
//   stockfc fit-linreg | fit-grnn | train-mlp   [--selection selected_variables.json]
//   stockfc compare    combine *_metrics.json artifacts found in --out
//
// Exit status: 0 success, 2 configuration/usage error, 3 data error,
// 4 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "stockfc/pipeline.hpp"

namespace fs = std::filesystem;
using namespace stockfc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool verbose = false;
    std::string selection;
};

PipelineConfig resolve_config(const Options& opt) {
    PipelineConfig cfg;
    if (!opt.config_path.empty()) cfg = load_config(opt.config_path);
    if (opt.seed) cfg.set_seed(*opt.seed);
    if (!opt.out.empty()) cfg.output_dir = opt.out;
    cfg.validate();
    return cfg;
}

std::vector<std::string> step_features(const Options& opt, const PipelineConfig& cfg, const Panel& panel,
                                       const PipelineLog& log) {
    if (!opt.selection.empty()) return load_selection(opt.selection);
    return select_features(cfg, panel, log).names;
}

int cmd_synth(const PipelineConfig& cfg, const PipelineLog& log) {
    if (cfg.input) throw ConfigError("synth: configuration names an input file instead of a synthetic panel");
    const auto dir = ensure_output_dir(cfg);
    const auto generated = synth_generate_with_truth(cfg.synth, default_catalog());
    write_panel(generated.panel, dir / artifact::kPanel);
    write_json(to_json(generated.truth), dir / artifact::kSynthTruth);
    log("wrote " + (dir / artifact::kPanel).string());
    return 0;
}

int cmd_select(const PipelineConfig& cfg, const PipelineLog& log) {
    const auto dir = ensure_output_dir(cfg);
    const auto panel = load_data(cfg, log);
    const auto sel = select_features(cfg, panel, log);
    write_json(sel.to_json(), dir / artifact::kSelection);
    std::cout << sel.to_json().dump(2) << '\n';
    return 0;
}

int cmd_fit_linreg(const Options& opt, const PipelineConfig& cfg, const PipelineLog& log) {
    const auto dir = ensure_output_dir(cfg);
    const auto panel = load_data(cfg, log);
    const auto data = prepare(cfg, panel, step_features(opt, cfg, panel, log));
    write_linreg(fit_linreg(cfg, data.split), dir);
    return 0;
}

int cmd_fit_grnn(const Options& opt, const PipelineConfig& cfg, const PipelineLog& log) {
    const auto dir = ensure_output_dir(cfg);
    const auto panel = load_data(cfg, log);
    const auto data = prepare(cfg, panel, step_features(opt, cfg, panel, log));
    write_grnn(fit_grnn(cfg, data.split), dir);
    return 0;
}

int cmd_train_mlp(const Options& opt, const PipelineConfig& cfg, const PipelineLog& log) {
    const auto dir = ensure_output_dir(cfg);
    const auto panel = load_data(cfg, log);
    const auto data = prepare(cfg, panel, step_features(opt, cfg, panel, log));
    write_mlp(fit_mlp(cfg, data.split), dir);
    return 0;
}

int cmd_compare(const PipelineConfig& cfg) {
    const fs::path dir = cfg.output_dir;
    std::vector<TrainTestMetrics> models;
    const auto grab = [&](const char* name) {
        const auto path = dir / name;
        if (!fs::exists(path)) return std::optional<json>{};
        return std::optional<json>{read_json(path)};
    };
    try {
        if (auto j = grab(artifact::kGrnnMetrics)) models.push_back(TrainTestMetrics::from_json(*j));
        if (auto j = grab(artifact::kLinregMetrics)) models.push_back(TrainTestMetrics::from_json(*j));
        if (auto j = grab(artifact::kMlpMetrics)) {
            models.push_back(TrainTestMetrics::from_json(j->at("untrained")));
            models.push_back(TrainTestMetrics::from_json(j->at("trained")));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed metrics artifact: ") + e.what());
    }
    if (models.size() < 2) throw DataError("compare: fewer than two metrics artifacts in " + dir.string());
    const auto comparison = compare_models(models);
    write_comparison(comparison, dir);
    std::cout << comparison.render();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stock price forecasting: stepwise OLS vs. GRNN vs. LM-trained MLP"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config_path, "Pipeline configuration file");
    app.add_option("--seed", opt.seed, "Override the master seed");
    app.add_option("--out", opt.out, "Override the output directory");
    app.add_flag("--verbose", opt.verbose, "Progress messages on stderr");

    auto* run = app.add_subcommand("run", "Full pipeline: select, fit, train, compare");
    auto* synth = app.add_subcommand("synth", "Write the synthetic panel as CSV");
    auto* select = app.add_subcommand("select", "Variable selection only");
    auto* fit_linreg_cmd = app.add_subcommand("fit-linreg", "Stepwise OLS fit and metrics");
    auto* fit_grnn_cmd = app.add_subcommand("fit-grnn", "GRNN build and metrics");
    auto* train_mlp_cmd = app.add_subcommand("train-mlp", "LM training of the MLP and metrics");
    auto* compare_cmd = app.add_subcommand("compare", "Comparison report from metrics artifacts");
    for (auto* sub : {fit_linreg_cmd, fit_grnn_cmd, train_mlp_cmd})
        sub->add_option("--selection", opt.selection, "selected_variables.json from a prior select step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        const auto cfg = resolve_config(opt);
        const PipelineLog log{opt.verbose};
        if (*run) {
            run_pipeline(cfg, log);
            std::cout << read_json(cfg.output_dir / artifact::kComparisonJson).at("test").at("ranking").dump()
                      << '\n';
            return 0;
        }
        if (*synth) return cmd_synth(cfg, log);
        if (*select) return cmd_select(cfg, log);
        if (*fit_linreg_cmd) return cmd_fit_linreg(opt, cfg, log);
        if (*fit_grnn_cmd) return cmd_fit_grnn(opt, cfg, log);
        if (*train_mlp_cmd) return cmd_train_mlp(opt, cfg, log);
        if (*compare_cmd) return cmd_compare(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitConfig;
}
