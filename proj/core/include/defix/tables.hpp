#pragma once

// Machine-readable (CSV) and human-readable (aligned text) renderings of the
// result tables, plus the registry of documented CSV schemas.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "defix/econometrics.hpp"
#include "defix/features.hpp"
#include "defix/stats.hpp"

namespace defix {

struct Table {
    std::string id;
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::string text;
    std::string note;

    std::string to_csv() const;
};

/// Documented CSV header for a table id. Throws Error{InvalidConfig} for an
/// unknown id.
const std::vector<std::string>& table_schema(std::string_view table_id);
/// Every table id the pipeline can emit.
const std::vector<std::string>& known_table_ids();

const std::vector<std::string>& regression_columns();

// ─── summary statistics ─────────────────────────────────────────────────────

struct SummaryEntry {
    std::string panel;      // "A", "B", "C"
    Frequency frequency;
    std::string variable;
    std::string units;      // "count", "usd", "log_diff", "interest", "percent"
    SummaryRow stats;       // already in display units
};

Table summary_table(const std::vector<SummaryEntry>& entries, std::string_view version);

// ─── correlations ───────────────────────────────────────────────────────────

Table correlation_table(std::string id, std::string title, const CorrMatrix& m,
                        std::string_view version);

// ─── regressions ────────────────────────────────────────────────────────────

struct RegressionRow {
    std::string label;  // dependent series or model id
    RegressionResult result;
};

/// One row per dependent series; text layout is coefficient with stars and
/// the t statistic in parentheses, R^2 in percent.
Table regression_table(std::string id, std::string title, const std::vector<RegressionRow>& rows,
                       std::string_view version);

/// Coefficient rows of a pooled panel fit with 95% confidence bounds.
Table panel_table(std::string id, std::string title, std::string label, const PanelResult& fit,
                  std::string_view version);

// ─── figure exports ─────────────────────────────────────────────────────────

struct CumulativeRow {
    Date date;
    double defix, btc, eth, crix;
};

Table cumulative_table(const std::vector<CumulativeRow>& rows, std::string_view version);

struct ScatterPoint {
    std::string symbol;
    Date date;
    LogLogPoint point;
};

Table scatter_table(const std::vector<ScatterPoint>& points, std::string_view version);

struct FeatureRow {
    Date date;
    std::string symbol;
    std::string feature;  // d_address, d_transaction, d_tvl, val_ratio
    double value;
};

Table features_table(const std::vector<FeatureRow>& rows, std::string_view version);

}  // namespace defix
