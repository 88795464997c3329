#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "stockfc/catalog.hpp"
#include "stockfc/error.hpp"
#include "stockfc/panel.hpp"
#include "stockfc/rng.hpp"

namespace stockfc {

struct SynthConfig {
    std::uint64_t seed = 7;
    int n_companies = 100;
    int n_months = 84;
    double noise_scale = 1.0;
    bool nonlinear = true;

    void validate() const {
        if (n_companies < 1) throw ConfigError("synth: n_companies must be >= 1");
        if (n_months < 3) throw ConfigError("synth: n_months must be >= 3");
        if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale))
            throw ConfigError("synth: noise_scale must be finite and >= 0");
    }
};

/// Generating coefficients for the price equation, in raw variable units:
/// price_t = intercept + sum_i coefficients[i] * x_{i,t-1} (+ nonlinear terms
/// when `nonlinear` is set) + noise.
struct SynthTruth {
    double intercept = 0.0;
    std::vector<std::string> drivers;
    std::vector<double> coefficients;
    bool nonlinear = false;
};

struct SynthPanel {
    Panel panel;
    SynthTruth truth;
};

namespace detail {

struct SeriesSpec {
    double mean;
    double scale;
    double persistence;
};

// Smooth saturating response on standardized drivers. Products and even
// functions have no linear projection, so OLS cannot represent this part.
inline double nonlinear_response(const std::vector<double>& z) {
    const auto at = [&](std::size_t i) { return i < z.size() ? z[i] : 0.0; };
    return 12.0 * std::tanh(at(0) * at(1)) + 9.0 * (1.0 - 2.0 * std::tanh(at(2)) * std::tanh(at(2))) +
           7.0 * std::tanh(1.5 * at(3)) * std::tanh(1.5 * at(4));
}

}  // namespace detail

/// Seeded stand-in for the Tehran panel. Every catalog variable is an AR(1)
/// series (macro series shared by all companies, financial series per
/// company with a company effect). Months are numbered 1..n_months; month 1's
/// price depends on an unobserved month 0.
inline SynthPanel synth_generate_with_truth(const SynthConfig& config,
                                            const VariableCatalog& catalog) {
    config.validate();
    catalog.validate();
    Rng rng(config.seed);

    const auto names = catalog.all_names();
    const std::size_t n_vars = names.size();
    std::vector<detail::SeriesSpec> spec(n_vars);
    for (auto& s : spec) {
        s.mean = rng.uniform(0.0, 100.0);
        s.scale = rng.uniform(0.5, 20.0);
        s.persistence = rng.uniform(0.3, 0.8);
    }

    std::vector<std::size_t> driver_idx;
    for (const auto& name : paper_seven())
        if (auto idx = catalog.index_of(name)) driver_idx.push_back(*idx);
    for (std::size_t i = 0; driver_idx.size() < 7 && i < n_vars; ++i)
        if (std::find(driver_idx.begin(), driver_idx.end(), i) == driver_idx.end())
            driver_idx.push_back(i);

    std::vector<double> weights;
    for (std::size_t k = 0; k < driver_idx.size(); ++k) {
        const double magnitude = rng.uniform(2.0, 6.0);
        weights.push_back(rng.uniform() < 0.5 ? -magnitude : magnitude);
    }
    const double base = 100.0;
    const double linear_share = config.nonlinear ? 0.25 : 1.0;

    SynthTruth truth;
    truth.nonlinear = config.nonlinear;
    truth.intercept = base;
    for (std::size_t k = 0; k < driver_idx.size(); ++k) {
        const auto& s = spec[driver_idx[k]];
        const double coef = linear_share * weights[k] / s.scale;
        truth.drivers.push_back(names[driver_idx[k]]);
        truth.coefficients.push_back(coef);
        truth.intercept -= coef * s.mean;
    }

    const auto n_companies = static_cast<std::size_t>(config.n_companies);
    std::vector<std::vector<double>> effect(n_companies, std::vector<double>(n_vars, 0.0));
    for (auto& row : effect)
        for (std::size_t v = 0; v < n_vars; ++v)
            if (!catalog.is_macro(names[v])) row[v] = rng.normal(0.0, 0.7);

    // Standardized latent state per (company, variable); macro rows are shared.
    std::vector<std::vector<double>> state(n_companies, std::vector<double>(n_vars, 0.0));
    std::vector<double> macro_state(n_vars, 0.0);
    const auto draw_state = [&](bool first) {
        for (std::size_t v = 0; v < n_vars; ++v) {
            if (!catalog.is_macro(names[v])) continue;
            const double phi = spec[v].persistence;
            macro_state[v] = first ? rng.normal()
                                   : phi * macro_state[v] + std::sqrt(1.0 - phi * phi) * rng.normal();
        }
        for (std::size_t c = 0; c < n_companies; ++c)
            for (std::size_t v = 0; v < n_vars; ++v) {
                if (catalog.is_macro(names[v])) {
                    state[c][v] = macro_state[v];
                    continue;
                }
                const double phi = spec[v].persistence;
                state[c][v] = first ? rng.normal()
                                    : phi * state[c][v] + std::sqrt(1.0 - phi * phi) * rng.normal();
            }
    };
    const auto raw_value = [&](std::size_t c, std::size_t v) {
        return spec[v].mean + spec[v].scale * (effect[c][v] + state[c][v]);
    };

    draw_state(true);  // month 0, never emitted

    std::vector<std::string> company_ids;
    const int width = std::max(3, static_cast<int>(std::to_string(config.n_companies).size()));
    for (std::size_t c = 0; c < n_companies; ++c) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "C%0*zu", width, c + 1);
        company_ids.emplace_back(buf);
    }

    SynthPanel out;
    out.truth = truth;
    out.panel.variable_names = names;
    std::vector<std::vector<Observation>> per_company(n_companies);
    for (int month = 1; month <= config.n_months; ++month) {
        std::vector<double> prices(n_companies);
        for (std::size_t c = 0; c < n_companies; ++c) {
            double price = truth.intercept;
            std::vector<double> z;
            for (std::size_t k = 0; k < driver_idx.size(); ++k) {
                const std::size_t v = driver_idx[k];
                const double x = raw_value(c, v);
                price += truth.coefficients[k] * x;
                z.push_back((x - spec[v].mean) / spec[v].scale);
            }
            if (config.nonlinear) price += detail::nonlinear_response(z);
            prices[c] = price;
        }
        draw_state(false);
        for (std::size_t c = 0; c < n_companies; ++c) {
            const double noise = config.noise_scale > 0.0 ? config.noise_scale * rng.normal() : 0.0;
            Observation obs;
            obs.company = company_ids[c];
            obs.month = month;
            obs.price = prices[c] + noise;
            obs.values.resize(n_vars);
            for (std::size_t v = 0; v < n_vars; ++v) obs.values[v] = raw_value(c, v);
            per_company[c].push_back(std::move(obs));
        }
    }
    for (auto& rows : per_company)
        for (auto& obs : rows) out.panel.observations.push_back(std::move(obs));
    return out;
}

inline Panel synth_generate(const SynthConfig& config, const VariableCatalog& catalog) {
    return synth_generate_with_truth(config, catalog).panel;
}

}  // namespace stockfc
