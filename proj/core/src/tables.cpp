#include "defix/tables.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "csv.hpp"
#include "defix/error.hpp"

namespace defix {

namespace {

const std::vector<std::string> kSummaryColumns{
    "table_id", "panel", "frequency", "variable", "units", "n", "mean", "sd",
    "max", "min", "sharpe", "skewness", "kurtosis", "durbin_watson"};
const std::vector<std::string> kCorrelationColumns{"table_id", "row", "col", "r", "p", "stars", "n"};
const std::vector<std::string> kRegressionColumns{
    "table_id", "row", "term", "coef", "se", "t", "p", "stars",
    "ci_low", "ci_high", "r2", "r2_between", "n"};
const std::vector<std::string> kCumulativeColumns{
    "date", "cumret_defix", "cumret_btc", "cumret_eth", "cumret_crix"};
const std::vector<std::string> kScatterColumns{"symbol", "date", "ln_tvl", "ln_mcap"};
const std::vector<std::string> kFeatureColumns{"date", "symbol", "feature", "value"};
const std::vector<std::string> kIndexColumns{"date", "level", "epoch_id"};

const std::map<std::string, const std::vector<std::string>*, std::less<>>& registry() {
    static const std::map<std::string, const std::vector<std::string>*, std::less<>> r{
        {"t1", &kSummaryColumns},      {"t2", &kCorrelationColumns}, {"t3", &kRegressionColumns},
        {"t4", &kRegressionColumns},   {"t5", &kRegressionColumns},  {"t6", &kCorrelationColumns},
        {"t7", &kRegressionColumns},   {"t8", &kRegressionColumns},  {"t9", &kRegressionColumns},
        {"t10", &kRegressionColumns},  {"t11", &kRegressionColumns}, {"t12", &kRegressionColumns},
        {"t13", &kRegressionColumns},  {"t14", &kRegressionColumns}, {"t15", &kRegressionColumns},
        {"t16", &kRegressionColumns},  {"d1", &kRegressionColumns},  {"d2", &kRegressionColumns},
        {"fig1", &kCumulativeColumns}, {"fig2", &kScatterColumns},   {"fig2_fit", &kRegressionColumns},
        {"features", &kFeatureColumns}, {"index", &kIndexColumns},
    };
    return r;
}

std::string num(double v) { return csv::format_exact(v); }

std::string fixed(double v, int decimals) { return csv::format_fixed(v, decimals); }

std::string percent(double v, int decimals) {
    if (is_missing(v)) return "";
    return csv::format_fixed(100.0 * v, decimals) + "%";
}

/// First column left-aligned, the rest right-aligned, two-space gutters.
std::string align(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& body) {
    auto width_of = [](const std::string& s) {
        // count UTF-8 code points, not bytes
        return static_cast<std::size_t>(std::count_if(
            s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
    };
    std::vector<std::size_t> width(header.size(), 0);
    auto widen = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
            width[i] = std::max(width[i], width_of(row[i]));
        }
    };
    widen(header);
    for (const auto& r : body) widen(r);

    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t i = 0; i < width.size(); ++i) {
            const std::string cell = i < row.size() ? row[i] : "";
            const std::string pad(width[i] - width_of(cell), ' ');
            if (i > 0) line += "  ";
            line += i == 0 ? cell + pad : pad + cell;
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line;
        out += '\n';
    };
    emit(header);
    for (const auto& r : body) emit(r);
    return out;
}

std::string banner(std::string_view id, std::string_view title, std::string_view version) {
    return "[" + std::string(id) + "] " + std::string(title) + "\n(defix " + std::string(version) +
           ")\n\n";
}

std::string n_span(const std::vector<std::size_t>& ns) {
    if (ns.empty()) return "n = 0";
    const auto [lo, hi] = std::minmax_element(ns.begin(), ns.end());
    if (*lo == *hi) return "n = " + std::to_string(*lo);
    return "n = " + std::to_string(*lo) + ".." + std::to_string(*hi);
}

}  // namespace

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += csv::quote_if_needed(columns[i]);
    }
    out += '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += csv::quote_if_needed(r[i]);
        }
        out += '\n';
    }
    return out;
}

const std::vector<std::string>& table_schema(std::string_view table_id) {
    const auto& r = registry();
    const auto it = r.find(table_id);
    if (it == r.end()) {
        throw Error(ErrorCode::InvalidConfig, "unknown table id '" + std::string(table_id) + "'");
    }
    return *it->second;
}

const std::vector<std::string>& known_table_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& [id, cols] : registry()) v.push_back(id);
        return v;
    }();
    return ids;
}

const std::vector<std::string>& regression_columns() { return kRegressionColumns; }

// ─── summary ────────────────────────────────────────────────────────────────

Table summary_table(const std::vector<SummaryEntry>& entries, std::string_view version) {
    Table t;
    t.id = "t1";
    t.title = "Summary statistics";
    t.columns = kSummaryColumns;
    std::vector<std::size_t> ns;
    for (const auto& e : entries) {
        const auto& s = e.stats;
        t.rows.push_back({t.id, e.panel, std::string(to_string(e.frequency)), e.variable, e.units,
                          std::to_string(s.n), num(s.mean), num(s.sd), num(s.max), num(s.min),
                          s.sharpe ? num(*s.sharpe) : "", num(s.skewness), num(s.kurtosis_excess),
                          num(s.durbin_watson)});
        ns.push_back(s.n);
    }

    std::string text = banner(t.id, t.title, version);
    for (const std::string panel : {"A", "B", "C"}) {
        std::vector<std::vector<std::string>> body;
        const bool returns = panel == "C";
        for (const auto& e : entries) {
            if (e.panel != panel) continue;
            const auto& s = e.stats;
            std::vector<std::string> row{std::string(to_string(e.frequency)) + "  " + e.variable,
                                         render3(s.mean), render3(s.sd)};
            if (returns) {
                row.push_back(s.sharpe ? render3(*s.sharpe) : "");
            } else {
                row.push_back(render3(s.max));
                row.push_back(render3(s.min));
            }
            row.push_back(render3(s.skewness));
            row.push_back(render3(s.kurtosis_excess));
            row.push_back(render3(s.durbin_watson));
            body.push_back(std::move(row));
        }
        if (body.empty()) continue;
        std::vector<std::string> header{"Panel " + panel, "Mean", "SD"};
        if (returns) {
            header.push_back("Sharpe");
        } else {
            header.push_back("Max");
            header.push_back("Min");
        }
        for (const char* h : {"Skewness", "Kurtosis", "Durbin-Watson"}) header.emplace_back(h);
        text += align(header, body);
        text += '\n';
    }
    text += "Returns in percent; kurtosis is excess kurtosis; Sharpe = mean / sd with a zero "
            "risk-free rate. " + n_span(ns) + ".\n";
    t.text = std::move(text);
    return t;
}

// ─── correlations ───────────────────────────────────────────────────────────

Table correlation_table(std::string id, std::string title, const CorrMatrix& m,
                        std::string_view version) {
    Table t;
    t.id = std::move(id);
    t.title = std::move(title);
    t.columns = kCorrelationColumns;
    const std::size_t k = m.labels.size();
    std::vector<std::size_t> ns;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            t.rows.push_back({t.id, m.labels[i], m.labels[j], num(m.r[i][j]), num(m.p[i][j]),
                              m.stars[i][j], std::to_string(m.n[i][j])});
            if (i != j) ns.push_back(m.n[i][j]);
        }
    }
    std::vector<std::string> header{""};
    header.insert(header.end(), m.labels.begin(), m.labels.end());
    std::vector<std::vector<std::string>> body;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<std::string> row{m.labels[i]};
        for (std::size_t j = 0; j <= i; ++j) {
            row.push_back(i == j ? "1" : fixed(m.r[i][j], 3) + m.stars[i][j]);
        }
        body.push_back(std::move(row));
    }
    t.text = banner(t.id, t.title, version) + align(header, body) +
             "\nPairwise-complete Pearson correlations; *:10%, **:5%, ***:1% (two-sided). " +
             n_span(ns) + ".\n";
    return t;
}

// ─── regressions ────────────────────────────────────────────────────────────

Table regression_table(std::string id, std::string title, const std::vector<RegressionRow>& rows,
                       std::string_view version) {
    Table t;
    t.id = std::move(id);
    t.title = std::move(title);
    t.columns = kRegressionColumns;

    std::vector<std::string> terms;
    std::vector<std::size_t> ns;
    for (const auto& r : rows) {
        const auto& res = r.result;
        const double tcrit = student_t_quantile(0.975, static_cast<double>(res.df));
        for (std::size_t j = 0; j < res.names.size(); ++j) {
            t.rows.push_back({t.id, r.label, res.names[j], num(res.coef[j]), num(res.se[j]),
                              num(res.t[j]), num(res.p[j]),
                              std::string(significance_stars(res.p[j])),
                              num(res.coef[j] - tcrit * res.se[j]),
                              num(res.coef[j] + tcrit * res.se[j]), num(res.r2), "",
                              std::to_string(res.n)});
            if (std::find(terms.begin(), terms.end(), res.names[j]) == terms.end()) {
                terms.push_back(res.names[j]);
            }
        }
        ns.push_back(res.n);
    }

    std::vector<std::string> header{""};
    for (const auto& term : terms) header.push_back(term == "const" ? "Constant" : term);
    header.emplace_back("R^2");
    header.emplace_back("n");
    std::vector<std::vector<std::string>> body;
    for (const auto& r : rows) {
        std::vector<std::string> row{r.label};
        for (const auto& term : terms) {
            const auto it = std::find(r.result.names.begin(), r.result.names.end(), term);
            if (it == r.result.names.end()) {
                row.emplace_back("");
                continue;
            }
            const auto j = static_cast<std::size_t>(it - r.result.names.begin());
            row.push_back(fixed(r.result.coef[j], 4) +
                          std::string(significance_stars(r.result.p[j])) + " (" +
                          fixed(r.result.t[j], 3) + ")");
        }
        row.push_back(percent(r.result.r2, 1));
        row.push_back(std::to_string(r.result.n));
        body.push_back(std::move(row));
    }
    t.text = banner(t.id, t.title, version) + align(header, body) +
             "\nt statistics in parentheses; *:10%, **:5%, ***:1%. " + n_span(ns) + ".\n";
    return t;
}

Table panel_table(std::string id, std::string title, std::string label, const PanelResult& fit,
                  std::string_view version) {
    Table t;
    t.id = std::move(id);
    t.title = std::move(title);
    t.columns = kRegressionColumns;
    std::vector<std::vector<std::string>> body;
    for (std::size_t j = 0; j < fit.names.size(); ++j) {
        const std::string stars(significance_stars(fit.p[j]));
        t.rows.push_back({t.id, label, fit.names[j], num(fit.coef[j]), num(fit.se[j]), num(fit.t[j]),
                          num(fit.p[j]), stars, num(fit.ci_low[j]), num(fit.ci_high[j]),
                          num(fit.r2), num(fit.r2_between), std::to_string(fit.n)});
        body.push_back({fit.names[j], fixed(fit.coef[j], 4) + stars, fixed(fit.se[j], 4),
                        fixed(fit.t[j], 4), fixed(fit.p[j], 4), fixed(fit.ci_low[j], 4),
                        fixed(fit.ci_high[j], 4)});
    }
    std::string text = banner(t.id, t.title, version) +
                       align({"", "Parameter", "Std. Err.", "T-stat", "P-value", "Lower CI",
                              "Upper CI"},
                             body);
    text += "\nR^2 is " + percent(fit.r2, 2) + ", R^2 between is " +
            (is_missing(fit.r2_between) ? std::string("n/a") : percent(fit.r2_between, 2)) + ". " +
            std::to_string(fit.entities) + " entities, " + std::to_string(fit.periods) +
            " periods, time effects included (" + std::to_string(fit.time_dummies) +
            " dummies). n = " + std::to_string(fit.n) + ".\n";
    for (const auto& w : fit.warnings) text += "warning: " + w + "\n";
    t.text = std::move(text);
    return t;
}

// ─── figure exports ─────────────────────────────────────────────────────────

Table cumulative_table(const std::vector<CumulativeRow>& rows, std::string_view version) {
    Table t;
    t.id = "fig1";
    t.title = "Cumulative daily returns: DeFiX, BTC, ETH, CRIX";
    t.columns = kCumulativeColumns;
    for (const auto& r : rows) {
        t.rows.push_back({format_date(r.date), num(r.defix), num(r.btc), num(r.eth), num(r.crix)});
    }
    std::vector<std::vector<std::string>> body;
    if (!rows.empty()) {
        const auto& last = rows.back();
        body.push_back({format_date(last.date), percent(last.defix, 2), percent(last.btc, 2),
                        percent(last.eth, 2), percent(last.crix, 2)});
    }
    t.text = banner(t.id, t.title, version) +
             align({"final date", "DeFiX", "BTC", "ETH", "CRIX"}, body) +
             "\nn = " + std::to_string(rows.size()) + " common dates; plot-ready data in fig1.csv.\n";
    return t;
}

Table scatter_table(const std::vector<ScatterPoint>& points, std::string_view version) {
    Table t;
    t.id = "fig2";
    t.title = "Log TVL against log market capitalization";
    t.columns = kScatterColumns;
    for (const auto& p : points) {
        t.rows.push_back({p.symbol, format_date(p.date), num(p.point.ln_tvl), num(p.point.ln_mcap)});
    }
    t.text = banner(t.id, t.title, version) + "n = " + std::to_string(points.size()) +
             " (symbol, date) points; plot-ready data in fig2.csv, fit in fig2_fit.\n";
    return t;
}

Table features_table(const std::vector<FeatureRow>& rows, std::string_view version) {
    Table t;
    t.id = "features";
    t.title = "Derived features";
    t.columns = kFeatureColumns;
    std::map<std::string, std::size_t> counts;
    for (const auto& r : rows) {
        t.rows.push_back({format_date(r.date), r.symbol, r.feature, num(r.value)});
        ++counts[r.feature];
    }
    std::vector<std::vector<std::string>> body;
    for (const auto& [feature, c] : counts) body.push_back({feature, std::to_string(c)});
    t.text = banner(t.id, t.title, version) + align({"feature", "n"}, body);
    return t;
}

}  // namespace defix
