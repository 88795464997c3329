#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "stockfc/error.hpp"

namespace stockfc {

/// Candidate explanatory variables: 10 macroeconomic and 30 firm-level
/// financial series. Names are lower-case and double as CSV column headers.
struct VariableCatalog {
    std::vector<std::string> macro_names;
    std::vector<std::string> financial_names;

    /// Macro names first, then financial names. This is "catalog order".
    std::vector<std::string> all_names() const {
        std::vector<std::string> out = macro_names;
        out.insert(out.end(), financial_names.begin(), financial_names.end());
        return out;
    }

    bool contains(std::string_view name) const {
        return index_of(name).has_value();
    }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < macro_names.size(); ++i)
            if (macro_names[i] == name) return i;
        for (std::size_t i = 0; i < financial_names.size(); ++i)
            if (financial_names[i] == name) return macro_names.size() + i;
        return std::nullopt;
    }

    bool is_macro(std::string_view name) const {
        return std::find(macro_names.begin(), macro_names.end(), name) != macro_names.end();
    }

    /// Throws DataError unless there are exactly 10 macro and 30 financial
    /// names, all distinct.
    void validate() const {
        if (macro_names.size() != 10 || financial_names.size() != 30)
            throw DataError("variable catalog must hold 10 macro and 30 financial names");
        std::unordered_set<std::string> seen;
        for (const auto& name : all_names()) {
            if (name.empty()) throw DataError("variable catalog contains an empty name");
            if (!seen.insert(name).second)
                throw DataError("duplicate variable name in catalog: " + name);
        }
    }

    /// Reorders `names` into catalog order. Unknown names throw DataError.
    std::vector<std::string> in_catalog_order(std::vector<std::string> names) const {
        for (const auto& n : names)
            if (!contains(n)) throw DataError("unknown variable: " + n);
        std::stable_sort(names.begin(), names.end(), [this](const auto& a, const auto& b) {
            return *index_of(a) < *index_of(b);
        });
        return names;
    }
};

inline const VariableCatalog& default_catalog() {
    static const VariableCatalog catalog{
        {
            "growth rates of industrial production",
            "inflation rate",
            "interest rate",
            "exchange rate",
            "rate of return on stock public",
            "unemployment rate",
            "oil price",
            "gross domestic product",
            "money supply 1",
            "money supply 2",
        },
        {
            "book value per share",
            "sales per share",
            "earning per share",
            "cash flow per share",
            "inventory turnover rate",
            "annual average volume of daily trading relative to annual average total market capitalization",
            "dividend yield",
            "dividend payout ratio",
            "dividend per share",
            "total of sales to total assets",
            "bid-ask spread",
            "market impact of a trade",
            "price per share",
            "trading volume",
            "turnover rate",
            "commission rate",
            "indicator variables for the day of the week effect",
            "holiday effect",
            "january month",
            "amortized effective spread",
            "price history",
            "past return",
            "size of firm",
            "ratio of total debt to stockholder's equity",
            "pastor measure",
            "ratio of absolute stock return to dollar volume",
            "market depth",
            "ratio of net income to book equity",
            "operating income to total assets",
            "operating income to total sales",
        },
    };
    return catalog;
}

/// The seven variables retained by the original Tehran study (three macro,
/// four financial), in catalog order. Usable as a feature source without
/// running ICA.
inline std::vector<std::string> paper_seven() {
    return {
        "growth rates of industrial production",
        "inflation rate",
        "money supply 1",
        "earning per share",
        "size of firm",
        "ratio of total debt to stockholder's equity",
        "operating income to total sales",
    };
}

}  // namespace stockfc
