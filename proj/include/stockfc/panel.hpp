#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <vector>

#include "stockfc/catalog.hpp"
#include "stockfc/error.hpp"

namespace stockfc {

struct Observation {
    std::string company;
    int month = 0;
    double price = 0.0;
    std::vector<double> values;  // aligned with Panel::variable_names
};

/// Company x month observations. Observations are kept sorted by
/// (company, month) with no duplicate pair, so months are strictly
/// increasing within each company.
struct Panel {
    std::vector<std::string> variable_names;
    std::vector<Observation> observations;
    std::size_t dropped_rows = 0;

    std::optional<std::size_t> variable_index(std::string_view name) const {
        auto it = std::find(variable_names.begin(), variable_names.end(), name);
        if (it == variable_names.end()) return std::nullopt;
        return static_cast<std::size_t>(it - variable_names.begin());
    }

    std::vector<std::string> companies() const {
        std::vector<std::string> out;
        for (const auto& obs : observations)
            if (out.empty() || out.back() != obs.company) out.push_back(obs.company);
        return out;
    }

    void validate(const VariableCatalog& catalog) const {
        for (const auto& name : variable_names)
            if (!catalog.contains(name)) throw DataError("unknown variable: " + name);
        for (std::size_t i = 0; i < observations.size(); ++i) {
            const auto& obs = observations[i];
            if (obs.values.size() != variable_names.size())
                throw DataError("observation width does not match variable list");
            if (!std::isfinite(obs.price) ||
                !std::all_of(obs.values.begin(), obs.values.end(),
                             [](double v) { return std::isfinite(v); }))
                throw DataError("non-finite value for company " + obs.company);
            if (i > 0) {
                const auto& prev = observations[i - 1];
                if (std::tie(prev.company, prev.month) >= std::tie(obs.company, obs.month))
                    throw DataError("observations not strictly ordered by (company, month)");
            }
        }
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_real(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

inline std::optional<int> parse_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace detail

/// Shortest decimal text that round-trips to the same double.
inline std::string format_real(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw NumericalError("cannot format value");
    return std::string(buf, ptr);
}

/// Parses `company,month,price,<var>...` CSV text. Rows with a wrong field
/// count, empty or non-numeric cells, or a repeated (company, month) pair are
/// dropped and counted in Panel::dropped_rows.
inline Panel parse_panel(std::istream& in, const VariableCatalog& catalog,
                         const std::string& source = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) throw DataError(source + ": empty file");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = detail::split_fields(line);
    std::optional<std::size_t> company_col, month_col, price_col;
    std::vector<std::pair<std::size_t, std::string>> var_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name(header[i]);
        if (name == "company") {
            company_col = i;
        } else if (name == "month") {
            month_col = i;
        } else if (name == "price") {
            price_col = i;
        } else {
            if (!catalog.contains(name))
                throw DataError(source + ": unknown variable '" + name + "' in header");
            for (const auto& [col, seen] : var_cols)
                if (seen == name) throw DataError(source + ": duplicate column '" + name + "'");
            var_cols.emplace_back(i, name);
        }
    }
    if (!company_col || !month_col || !price_col)
        throw DataError(source + ": header must name company, month and price columns");
    if (var_cols.empty()) throw DataError(source + ": header names no catalog variable");

    Panel panel;
    for (const auto& [col, name] : var_cols) panel.variable_names.push_back(name);

    std::vector<Observation> rows;
    std::size_t dropped = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_fields(line);
        if (fields.size() != header.size()) {
            ++dropped;
            continue;
        }
        Observation obs;
        obs.company = std::string(fields[*company_col]);
        const auto month = detail::parse_int(fields[*month_col]);
        const auto price = detail::parse_real(fields[*price_col]);
        bool ok = !obs.company.empty() && month && price;
        if (ok) {
            obs.month = *month;
            obs.price = *price;
            obs.values.reserve(var_cols.size());
            for (const auto& [col, name] : var_cols) {
                const auto v = detail::parse_real(fields[col]);
                if (!v) {
                    ok = false;
                    break;
                }
                obs.values.push_back(*v);
            }
        }
        if (!ok) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(obs));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Observation& a, const Observation& b) {
        return std::tie(a.company, a.month) < std::tie(b.company, b.month);
    });
    for (auto& obs : rows) {
        if (!panel.observations.empty() && panel.observations.back().company == obs.company &&
            panel.observations.back().month == obs.month) {
            ++dropped;
            continue;
        }
        panel.observations.push_back(std::move(obs));
    }
    panel.dropped_rows = dropped;
    if (panel.observations.empty()) throw DataError(source + ": no valid rows");
    return panel;
}

inline Panel load_panel(const std::filesystem::path& path, const VariableCatalog& catalog) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read panel file: " + path.string());
    return parse_panel(in, catalog, path.string());
}

inline void write_panel(const Panel& panel, std::ostream& out) {
    out << "company,month,price";
    for (const auto& name : panel.variable_names) out << ',' << name;
    out << '\n';
    for (const auto& obs : panel.observations) {
        out << obs.company << ',' << obs.month << ',' << format_real(obs.price);
        for (double v : obs.values) out << ',' << format_real(v);
        out << '\n';
    }
}

inline void write_panel(const Panel& panel, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write panel file: " + path.string());
    write_panel(panel, out);
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace stockfc
