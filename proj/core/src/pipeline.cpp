#include "defix/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "csv.hpp"
#include "defix/econometrics.hpp"
#include "defix/features.hpp"

namespace defix {

std::string_view library_version() noexcept { return DEFIX_VERSION; }

std::string_view to_string(NetworkVariable v) noexcept {
    switch (v) {
    case NetworkVariable::tvl: return "d_tvl";
    case NetworkVariable::transactions: return "d_transaction";
    case NetworkVariable::addresses: return "d_address";
    }
    return "";
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::Io, "sha256 failed");
    }
    std::ostringstream out;
    out << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
    return out.str();
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return in;
}

/// Re-raises an ingestion error with the file it came from.
template <class F>
auto with_file(const std::filesystem::path& path, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), path.filename().string() + ": " + e.what());
    }
}

template <class F>
bool attempt(TableOutput& out, const std::string& row, F&& f) {
    try {
        f();
        return true;
    } catch (const Error& e) {
        out.failures.push_back({out.table.id, row, e.code(), e.what()});
        return false;
    }
}

std::string header_text(const std::string& id, const std::string& title) {
    return "[" + id + "] " + title + "\n(defix " + std::string(library_version()) + ")\n\n";
}

/// Table with the documented columns and no rows, for a table that could
/// not be produced at all.
TableOutput failed_table(std::string id, std::string title, std::vector<Failure> failures) {
    TableOutput out;
    out.table.id = std::move(id);
    out.table.title = std::move(title);
    out.table.columns = table_schema(out.table.id);
    out.table.text = header_text(out.table.id, out.table.title);
    out.failures = std::move(failures);
    out.failed = true;
    return out;
}

template <class F>
TableOutput whole_table(std::string id, std::string title, F&& build) {
    try {
        return build();
    } catch (const Error& e) {
        return failed_table(id, title, {{id, "", e.code(), e.what()}});
    }
}

/// Columns aligned on the union of dates, missing where a series has no value.
std::vector<std::vector<double>> align_union(const std::vector<Series>& series) {
    std::set<Date> dates;
    for (const auto& s : series) dates.insert(s.dates.begin(), s.dates.end());
    std::vector<std::vector<double>> columns;
    for (const auto& s : series) {
        std::vector<double> col;
        col.reserve(dates.size());
        for (Date d : dates) col.push_back(s.value_at(d));
        columns.push_back(std::move(col));
    }
    return columns;
}

/// Contemporaneous design: rows where y and every regressor are present.
LaggedDesign align_contemporaneous(const Series& y,
                                   const std::vector<std::pair<std::string, Series>>& regressors) {
    LaggedDesign out;
    std::vector<std::vector<double>> cols(regressors.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (is_missing(y.values[i])) continue;
        std::vector<double> row;
        for (const auto& [name, s] : regressors) {
            const double v = s.value_at(y.dates[i]);
            if (is_missing(v)) break;
            row.push_back(v);
        }
        if (row.size() != regressors.size()) continue;
        out.dates.push_back(y.dates[i]);
        out.y.push_back(y.values[i]);
        for (std::size_t j = 0; j < row.size(); ++j) cols[j].push_back(row[j]);
    }
    for (std::size_t j = 0; j < regressors.size(); ++j) {
        out.x.add(regressors[j].first, std::move(cols[j]));
    }
    return out;
}

void append_failures(TableOutput& out) {
    for (const auto& f : out.failures) {
        out.table.text += "not produced" + (f.row.empty() ? std::string() : " [" + f.row + "]") +
                          ": " + f.message + "\n";
    }
}

std::string predictor_symbol(const RunConfig& c, std::string_view predictor) {
    if (predictor == "btc") return c.btc;
    if (predictor == "eth") return c.eth;
    if (predictor == "crix") return c.crix;
    throw Error(ErrorCode::InvalidConfig,
                "unknown predictor '" + std::string(predictor) + "' (expected btc, eth or crix)");
}

}  // namespace

// ─── loading ────────────────────────────────────────────────────────────────

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {}

void Pipeline::load() {
    if (loaded_) return;
    validate(config_);

    TokenPanel raw = with_file(config_.prices, [&] {
        auto in = open_input(config_.prices);
        return ingest_prices(in);
    });
    if (config_.tvl) {
        unmatched_.push_back(with_file(*config_.tvl, [&] {
            auto in = open_input(*config_.tvl);
            return ingest_tvl(in, raw);
        }));
    }
    if (config_.network) {
        unmatched_.push_back(with_file(*config_.network, [&] {
            auto in = open_input(*config_.network);
            return ingest_network(in, raw);
        }));
    }
    if (config_.attention) {
        attention_ = with_file(*config_.attention, [&] {
            auto in = open_input(*config_.attention);
            return ingest_attention(in);
        });
    }
    auto cleaned = clean_panel(raw, config_.missing_policy);
    panel_ = std::move(cleaned.panel);
    cleaning_ = std::move(cleaned.report);

    std::size_t dropped_rows = 0, filled_rows = 0;
    std::vector<std::string> dropped_symbols;
    for (const auto& e : cleaning_.entries) {
        dropped_rows += e.rows_dropped;
        filled_rows += e.rows_filled;
        if (e.symbol_dropped) dropped_symbols.push_back(e.symbol);
    }
    if (dropped_rows || filled_rows) {
        warnings_.push_back("cleaning: " + std::to_string(dropped_rows) + " rows dropped, " +
                            std::to_string(filled_rows) + " rows filled");
    }
    for (const auto& s : dropped_symbols) {
        warnings_.push_back("cleaning: symbol " + s + " has no priced rows and was removed");
    }
    for (const auto& u : unmatched_) {
        for (const auto& [symbol, n] : u.rows_by_symbol) {
            warnings_.push_back(u.source + ": " + std::to_string(n) + " rows for " + symbol +
                                " which has no price history");
        }
    }
    loaded_ = true;
}

const TokenPanel& Pipeline::panel() {
    load();
    return panel_;
}

const CleaningReport& Pipeline::cleaning_report() {
    load();
    return cleaning_;
}

const std::vector<UnmatchedReport>& Pipeline::unmatched_reports() {
    load();
    return unmatched_;
}

const std::vector<AttentionSeries>& Pipeline::attention() {
    load();
    return attention_;
}

const IndexSeries& Pipeline::index() {
    load();
    if (index_error_) throw *index_error_;
    if (!index_) {
        try {
            index_ = run_index(panel_, config_.schedule, config_.index);
        } catch (const Error& e) {
            index_error_ = e;
            throw;
        }
    }
    return *index_;
}

Series Pipeline::levels(std::string_view name) {
    if (name == kIndexName) return index().levels;
    Series s = panel().price_series(std::string(name));
    if (s.empty()) {
        throw Error(ErrorCode::MissingPrice, "no price history for " + std::string(name));
    }
    return s;
}

ReturnSeries Pipeline::returns(std::string_view name, Frequency frequency) {
    const auto key = std::make_pair(std::string(name), static_cast<int>(frequency));
    if (auto it = return_cache_.find(key); it != return_cache_.end()) return it->second;
    ReturnSeries r = simple_returns(levels(name), Frequency::daily);
    if (frequency != Frequency::daily) r = aggregate_returns(r, frequency);
    return_cache_.emplace(key, r);
    return r;
}

// ─── universes ──────────────────────────────────────────────────────────────

std::vector<std::string> Pipeline::major_tokens() {
    const auto& p = panel();
    const auto& excluded = config_.index.excluded;
    std::vector<std::string> out;
    if (config_.major_rule == MajorRule::fixed) {
        for (const auto& s : config_.major) {
            if (p.rows.count(s) && !excluded.count(s)) out.push_back(s);
        }
        return out;
    }
    const auto calendar = p.calendar();
    if (calendar.empty()) return out;
    const Date last = calendar.back();
    const Date first = last - std::chrono::days(static_cast<int>(config_.major_window_days) - 1);
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& [symbol, rows] : p.rows) {
        if (excluded.count(symbol)) continue;
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& o : rows) {
            if (o.date < first || o.date > last || !o.market_cap) continue;
            sum += *o.market_cap;
            ++n;
        }
        if (n) ranked.emplace_back(sum / static_cast<double>(n), symbol);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::size_t i = 0; i < ranked.size() && i < config_.major_count; ++i) {
        out.push_back(ranked[i].second);
    }
    return out;
}

namespace {

template <class Extension>
std::vector<std::string> universe(const TokenPanel& p, const Extension& ext,
                                  const std::vector<std::string>& configured,
                                  const std::set<std::string>& excluded) {
    std::vector<std::string> out;
    if (!configured.empty()) {
        for (const auto& s : configured) {
            if (p.rows.count(s) && ext.count(s)) out.push_back(s);
        }
        return out;
    }
    for (const auto& [symbol, rows] : ext) {
        if (p.rows.count(symbol) && !excluded.count(symbol)) out.push_back(symbol);
    }
    return out;
}

}  // namespace

std::vector<std::string> Pipeline::tvl_tokens() {
    const auto& p = panel();
    return universe(p, p.tvl, config_.all_tvl, config_.index.excluded);
}

std::vector<std::string> Pipeline::network_tokens() {
    const auto& p = panel();
    return universe(p, p.network, config_.all_network, config_.index.excluded);
}

// ─── derived series ─────────────────────────────────────────────────────────

Series Pipeline::network_growth(const std::string& symbol, NetworkVariable v, Frequency frequency) {
    const auto& p = panel();
    const Series daily = v == NetworkVariable::tvl            ? p.tvl_series(symbol)
                         : v == NetworkVariable::transactions ? p.transaction_series(symbol)
                                                              : p.address_series(symbol);
    Series growth = log_growth(daily, Frequency::daily).growth;
    if (frequency == Frequency::daily) return growth;
    return resample(growth, frequency, Aggregation::sum);
}

Series Pipeline::network_factor(NetworkVariable v, Frequency frequency) {
    const auto tokens = v == NetworkVariable::tvl ? tvl_tokens() : network_tokens();
    std::map<Date, std::pair<double, std::size_t>> acc;
    for (const auto& s : tokens) {
        const Series g = network_growth(s, v, frequency);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (is_missing(g.values[i])) continue;
            auto& slot = acc[g.dates[i]];
            slot.first += g.values[i];
            ++slot.second;
        }
    }
    Series out;
    for (const auto& [d, sc] : acc) out.push_back(d, sc.first / static_cast<double>(sc.second));
    if (out.empty()) {
        throw Error(ErrorCode::TooFewObservations,
                    "no " + std::string(to_string(v)) + " observations for any token");
    }
    return out;
}

Series Pipeline::valuation_ratio_series(const std::string& symbol, Frequency frequency) {
    const auto& p = panel();
    Series ratio = valuation_ratio(p.tvl_series(symbol), p.market_cap_series(symbol)).ratio;
    if (frequency == Frequency::daily) return ratio;
    return resample(ratio, frequency, Aggregation::last);
}

// ─── tables ─────────────────────────────────────────────────────────────────

TableOutput Pipeline::summary_table() {
    load();
    TableOutput out;
    out.table.id = "t1";
    std::vector<SummaryEntry> entries;

    auto pooled = [&](const std::vector<std::string>& tokens, auto&& series_of) {
        std::vector<double> values;
        for (const auto& s : tokens) {
            const auto v = series_of(s).present_values();
            values.insert(values.end(), v.begin(), v.end());
        }
        return values;
    };
    const auto net = network_tokens();
    const auto tvl = tvl_tokens();
    struct PanelA {
        std::string variable;
        std::string units;
        const std::vector<std::string>* tokens;
        std::function<Series(const std::string&)> series;
    };
    const std::vector<PanelA> panel_a{
        {"address_count", "count", &net, [&](const std::string& s) { return panel_.address_series(s); }},
        {"transaction_count", "count", &net,
         [&](const std::string& s) { return panel_.transaction_series(s); }},
        {"tvl", "usd", &tvl, [&](const std::string& s) { return panel_.tvl_series(s); }},
        {"d_address", "log_diff", &net,
         [&](const std::string& s) { return network_growth(s, NetworkVariable::addresses, Frequency::daily); }},
        {"d_transaction", "log_diff", &net,
         [&](const std::string& s) {
             return network_growth(s, NetworkVariable::transactions, Frequency::daily);
         }},
        {"d_tvl", "log_diff", &tvl,
         [&](const std::string& s) { return network_growth(s, NetworkVariable::tvl, Frequency::daily); }},
    };
    for (const auto& a : panel_a) {
        attempt(out, "A/daily/" + a.variable, [&] {
            const auto values = pooled(*a.tokens, a.series);
            entries.push_back({"A", Frequency::daily, a.variable, a.units, summary_stats(values, false)});
        });
    }

    for (std::size_t i = 0; i < config_.attention_terms.size(); ++i) {
        const auto& term = config_.attention_terms[i];
        attempt(out, "B/weekly/" + term, [&] {
            const auto it = std::find_if(attention_.begin(), attention_.end(),
                                         [&](const AttentionSeries& a) { return a.term == term; });
            if (it == attention_.end()) {
                throw Error(ErrorCode::TooFewObservations, "no attention series for '" + term + "'");
            }
            const auto values = it->interest.present_values();
            entries.push_back({"B", Frequency::weekly, term, "interest", summary_stats(values, false)});
        });
    }

    const std::vector<std::string> names{std::string(kIndexName), config_.crix, config_.btc,
                                         config_.eth};
    for (Frequency f : {Frequency::daily, Frequency::weekly, Frequency::monthly}) {
        for (const auto& name : names) {
            attempt(out, "C/" + std::string(to_string(f)) + "/" + name, [&] {
                const auto values = returns(name, f).rows.present_values();
                entries.push_back({"C", f, name, "percent", to_percent(summary_stats(values, true))});
            });
        }
    }

    auto failures = std::move(out.failures);
    out.table = defix::summary_table(entries, library_version());
    out.failures = std::move(failures);
    out.failed = entries.empty();
    append_failures(out);
    return out;
}

TableOutput Pipeline::market_correlations() {
    const std::string title = "Pearson correlations of " +
                              std::string(to_string(config_.frequency)) +
                              " returns: index and crypto benchmarks";
    return whole_table("t2", title, [&] {
        const std::vector<std::string> names{std::string(kIndexName), config_.eth, config_.btc,
                                             config_.crix};
        std::vector<Series> series;
        for (const auto& n : names) series.push_back(returns(n, config_.frequency).rows);
        TableOutput out;
        out.table = correlation_table("t2", title, pearson_matrix(names, align_union(series)),
                                      library_version());
        return out;
    });
}

TableOutput Pipeline::network_correlations() {
    const std::string title = "Pearson correlations among network growth factors";
    return whole_table("t6", title, [&] {
        const std::vector<NetworkVariable> vars{NetworkVariable::transactions,
                                                NetworkVariable::addresses, NetworkVariable::tvl};
        std::vector<std::string> labels;
        std::vector<Series> series;
        for (auto v : vars) {
            labels.emplace_back(to_string(v));
            series.push_back(network_factor(v, config_.frequency));
        }
        TableOutput out;
        out.table = correlation_table("t6", title, pearson_matrix(labels, align_union(series)),
                                      library_version());
        return out;
    });
}

TableOutput Pipeline::lagged_regressions(std::string_view predictor, Frequency frequency) {
    const std::string id = predictor == "btc" ? "t3" : predictor == "eth" ? "t4" : "t5";
    const std::string symbol = predictor_symbol(config_, predictor);
    const std::string title = "Lagged " + symbol + " returns as predictors of index and token returns";
    return whole_table(id, title, [&] {
        const Series x = returns(symbol, frequency).rows;
        TableOutput out;
        out.table.id = id;
        std::vector<RegressionRow> rows;
        std::vector<std::string> dependents{std::string(kIndexName)};
        for (const auto& s : major_tokens()) dependents.push_back(s);
        for (const auto& dep : dependents) {
            attempt(out, dep, [&] {
                const auto design =
                    make_lags(returns(dep, frequency).rows, {{symbol, x, config_.lags_crypto}}, frequency);
                rows.push_back({dep, ols(design.y, design.x)});
            });
        }
        auto failures = std::move(out.failures);
        out.table = regression_table(id, title, rows, library_version());
        out.failures = std::move(failures);
        out.failed = rows.empty();
        append_failures(out);
        return out;
    });
}

TableOutput Pipeline::network_exposure(Frequency frequency) {
    const std::string title = "Index returns on contemporaneous network growth factors";
    return whole_table("t7", title, [&] {
        const Series y = returns(kIndexName, frequency).rows;
        TableOutput out;
        out.table.id = "t7";
        std::map<NetworkVariable, std::optional<Series>> factors;
        for (auto v : {NetworkVariable::transactions, NetworkVariable::addresses, NetworkVariable::tvl}) {
            attempt(out, std::string(to_string(v)), [&] { factors[v] = network_factor(v, frequency); });
        }
        const std::vector<std::pair<std::string, std::vector<NetworkVariable>>> models{
            {"(7)", {NetworkVariable::transactions}},
            {"(8)", {NetworkVariable::addresses}},
            {"(9)", {NetworkVariable::tvl}},
            {"(10)", {NetworkVariable::transactions, NetworkVariable::addresses, NetworkVariable::tvl}},
        };
        std::vector<RegressionRow> rows;
        for (const auto& [label, vars] : models) {
            attempt(out, label, [&] {
                std::vector<std::pair<std::string, Series>> regressors;
                for (auto v : vars) {
                    if (!factors[v]) {
                        throw Error(ErrorCode::TooFewObservations,
                                    "factor " + std::string(to_string(v)) + " unavailable");
                    }
                    regressors.emplace_back(std::string(to_string(v)), *factors[v]);
                }
                const auto design = align_contemporaneous(y, regressors);
                rows.push_back({label, ols(design.y, design.x)});
            });
        }
        auto failures = std::move(out.failures);
        out.table = regression_table("t7", title, rows, library_version());
        out.failures = std::move(failures);
        out.failed = rows.empty();
        append_failures(out);
        return out;
    });
}

TableOutput Pipeline::network_panel(NetworkVariable v, bool major_only, Frequency frequency) {
    const int base = v == NetworkVariable::tvl ? 8 : v == NetworkVariable::transactions ? 10 : 12;
    const std::string id = "t" + std::to_string(base + (major_only ? 1 : 0));
    const std::string what = v == NetworkVariable::tvl            ? "TVL growth"
                             : v == NetworkVariable::transactions ? "transaction growth"
                                                                  : "address growth";
    const std::string title = std::string("Panel OLS with time effects: ") +
                              (major_only ? "major" : "all") + " token returns on lagged " + what;
    return whole_table(id, title, [&] {
        auto tokens = v == NetworkVariable::tvl ? tvl_tokens() : network_tokens();
        if (major_only) {
            const auto major = major_tokens();
            std::vector<std::string> kept;
            for (const auto& s : major) {
                if (std::find(tokens.begin(), tokens.end(), s) != tokens.end()) kept.push_back(s);
            }
            tokens = std::move(kept);
        }
        TableOutput out;
        out.table.id = id;
        std::vector<PanelEntity> entities;
        for (const auto& s : tokens) {
            try {
                entities.push_back({s, returns(s, frequency).rows, network_growth(s, v, frequency)});
            } catch (const Error& e) {
                out.warnings.push_back(id + ": entity " + s + " skipped: " + e.what());
            }
        }
        std::vector<std::string> skipped;
        const auto data = build_lagged_panel(entities, std::string(to_string(v)), config_.lags_network,
                                             frequency, &skipped);
        for (const auto& s : skipped) {
            out.warnings.push_back(id + ": entity " + s + " has no complete lagged row");
        }
        const auto fit = panel_ols_time_effects(data);
        for (const auto& w : fit.warnings) out.warnings.push_back(id + ": " + w);
        out.table = panel_table(id, title, major_only ? "major" : "all", fit, library_version());
        return out;
    });
}

TableOutput Pipeline::attention_regressions(Frequency frequency) {
    const std::string title = "Lagged search attention as a predictor of index and token returns";
    return whole_table("t14", title, [&] {
        load();
        std::vector<LagSpec> specs;
        for (std::size_t i = 0; i < config_.attention_terms.size(); ++i) {
            const auto& term = config_.attention_terms[i];
            const auto it = std::find_if(attention_.begin(), attention_.end(),
                                         [&](const AttentionSeries& a) { return a.term == term; });
            if (it == attention_.end()) {
                throw Error(ErrorCode::TooFewObservations, "no attention series for '" + term + "'");
            }
            Series sundays;
            for (std::size_t k = 0; k < it->interest.size(); ++k) {
                sundays.push_back(week_start(it->interest.dates[k]), it->interest.values[k]);
            }
            if (frequency != Frequency::weekly) sundays = resample(sundays, frequency, Aggregation::last);
            specs.push_back({config_.attention_labels[i], std::move(sundays), config_.lags_attention});
        }
        TableOutput out;
        out.table.id = "t14";
        std::vector<RegressionRow> rows;
        std::vector<std::string> dependents{std::string(kIndexName)};
        for (const auto& s : major_tokens()) dependents.push_back(s);
        for (const auto& dep : dependents) {
            attempt(out, dep, [&] {
                const auto design = make_lags(returns(dep, frequency).rows, specs, frequency);
                rows.push_back({dep, ols(design.y, design.x)});
            });
        }
        auto failures = std::move(out.failures);
        out.table = regression_table("t14", title, rows, library_version());
        out.failures = std::move(failures);
        out.failed = rows.empty();
        append_failures(out);
        return out;
    });
}

TableOutput Pipeline::valuation_panel(bool major_only, Frequency frequency) {
    const bool monthly = frequency == Frequency::monthly;
    const std::string id = monthly ? (major_only ? "d2" : "d1") : (major_only ? "t16" : "t15");
    const std::string title = std::string("Panel OLS with time effects: ") +
                              (major_only ? "major" : "all") + " token " +
                              std::string(to_string(frequency)) +
                              " returns on the lagged TVL-to-market ratio";
    return whole_table(id, title, [&] {
        auto tokens = tvl_tokens();
        if (major_only) {
            const auto major = major_tokens();
            std::vector<std::string> kept;
            for (const auto& s : major) {
                if (std::find(tokens.begin(), tokens.end(), s) != tokens.end()) kept.push_back(s);
            }
            tokens = std::move(kept);
        }
        TableOutput out;
        out.table.id = id;
        std::vector<PanelEntity> entities;
        for (const auto& s : tokens) {
            try {
                entities.push_back({s, returns(s, frequency).rows, valuation_ratio_series(s, frequency)});
            } catch (const Error& e) {
                out.warnings.push_back(id + ": entity " + s + " skipped: " + e.what());
            }
        }
        std::vector<std::string> skipped;
        const auto data =
            build_lagged_panel(entities, "ValRatio", config_.lags_valuation, frequency, &skipped);
        for (const auto& s : skipped) {
            out.warnings.push_back(id + ": entity " + s + " has no complete lagged row");
        }
        const auto fit = panel_ols_time_effects(data);
        for (const auto& w : fit.warnings) out.warnings.push_back(id + ": " + w);
        out.table = panel_table(id, title, major_only ? "major" : "all", fit, library_version());
        return out;
    });
}

namespace {

struct ScatterData {
    std::vector<ScatterPoint> points;
    std::vector<double> tvl;
    std::vector<double> mcap;
};

ScatterData scatter_data(Pipeline& p, Frequency frequency) {
    ScatterData out;
    for (const auto& s : p.tvl_tokens()) {
        Series tvl = p.panel().tvl_series(s);
        Series mcap = p.panel().market_cap_series(s);
        if (frequency != Frequency::daily) {
            tvl = resample(tvl, frequency, Aggregation::last);
            mcap = resample(mcap, frequency, Aggregation::last);
        }
        const auto [a, b] = intersect(tvl, mcap);
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double t = a.values[i];
            const double m = b.values[i];
            if (is_missing(t) || is_missing(m) || !(t > 0.0) || !(m > 0.0)) continue;
            out.points.push_back({s, a.dates[i], {std::log(t), std::log(m)}});
            out.tvl.push_back(t);
            out.mcap.push_back(m);
        }
    }
    return out;
}

}  // namespace

TableOutput Pipeline::valuation_scatter(Frequency frequency) {
    return whole_table("fig2", "Log TVL against log market capitalization", [&] {
        TableOutput out;
        out.table = scatter_table(scatter_data(*this, frequency).points, library_version());
        return out;
    });
}

TableOutput Pipeline::valuation_fit(Frequency frequency) {
    const std::string title = "OLS of log market capitalization on log TVL";
    return whole_table("fig2_fit", title, [&] {
        const auto data = scatter_data(*this, frequency);
        TableOutput out;
        out.table = regression_table("fig2_fit", title,
                                     {{"ln_mcap", loglog_fit(data.tvl, data.mcap).regression}},
                                     library_version());
        return out;
    });
}

TableOutput Pipeline::cumulative() {
    return whole_table("fig1", "Cumulative daily returns: DeFiX, BTC, ETH, CRIX", [&] {
        const std::vector<std::string> names{std::string(kIndexName), config_.btc, config_.eth,
                                             config_.crix};
        std::vector<Series> daily;
        for (const auto& n : names) daily.push_back(returns(n, Frequency::daily).rows);
        std::vector<Date> common;
        for (std::size_t i = 0; i < daily[0].size(); ++i) {
            const Date d = daily[0].dates[i];
            bool all = true;
            for (const auto& s : daily) all = all && !is_missing(s.value_at(d));
            if (all) common.push_back(d);
        }
        std::vector<Series> cum;
        for (const auto& s : daily) {
            ReturnSeries trimmed;
            for (Date d : common) trimmed.rows.push_back(d, s.value_at(d));
            cum.push_back(cumulative_returns(trimmed));
        }
        std::vector<CumulativeRow> rows;
        for (std::size_t i = 0; i < common.size(); ++i) {
            rows.push_back({common[i], cum[0].values[i], cum[1].values[i], cum[2].values[i],
                            cum[3].values[i]});
        }
        TableOutput out;
        out.table = cumulative_table(rows, library_version());
        return out;
    });
}

TableOutput Pipeline::features(Frequency frequency) {
    return whole_table("features", "Derived features", [&] {
        const auto net = network_tokens();
        const auto tvl = tvl_tokens();
        std::set<std::string> symbols(net.begin(), net.end());
        symbols.insert(tvl.begin(), tvl.end());
        std::vector<FeatureRow> rows;
        auto emit = [&](const std::string& symbol, const char* feature, const Series& s) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (!is_missing(s.values[i])) rows.push_back({s.dates[i], symbol, feature, s.values[i]});
            }
        };
        for (const auto& s : symbols) {
            const bool has_net = std::find(net.begin(), net.end(), s) != net.end();
            const bool has_tvl = std::find(tvl.begin(), tvl.end(), s) != tvl.end();
            if (has_net) {
                emit(s, "d_address", network_growth(s, NetworkVariable::addresses, frequency));
                emit(s, "d_transaction", network_growth(s, NetworkVariable::transactions, frequency));
            }
            if (has_tvl) {
                emit(s, "d_tvl", network_growth(s, NetworkVariable::tvl, frequency));
                emit(s, "val_ratio", valuation_ratio_series(s, frequency));
            }
        }
        TableOutput out;
        out.table = features_table(rows, library_version());
        return out;
    });
}

// ─── command runner ─────────────────────────────────────────────────────────

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> commands{
        "build-index", "summary", "correlations", "lagged-regressions", "network",
        "attention",   "valuation", "cumulative", "features",           "all"};
    return commands;
}

namespace {

void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

class Runner {
public:
    Runner(const RunConfig& config, RunOutcome& outcome)
        : dir_(config.output_dir), outcome_(outcome) {}

    void file(const std::string& name, const std::string& table_id, std::size_t rows,
              const std::string& status, const std::string& bytes) {
        write_atomic(dir_ / name, bytes);
        outcome_.artifacts.push_back({name, table_id, rows, status, sha256_hex(bytes)});
    }

    void table(TableOutput t) {
        const std::string status = t.failed ? "failed" : t.failures.empty() ? "ok" : "partial";
        file(t.table.id + ".csv", t.table.id, t.table.rows.size(), status, t.table.to_csv());
        file(t.table.id + ".txt", t.table.id, t.table.rows.size(), status, t.table.text);
        for (auto& f : t.failures) outcome_.failures.push_back(std::move(f));
        for (auto& w : t.warnings) outcome_.warnings.push_back(std::move(w));
    }

private:
    std::filesystem::path dir_;
    RunOutcome& outcome_;
};

void build_index_files(Pipeline& p, Runner& run, RunOutcome& outcome) {
    try {
        const auto& index = p.index();
        std::ostringstream csv, json;
        write_index_csv(index, csv);
        write_epochs_json(index, json);
        run.file("index.csv", "index", index.levels.size(), "ok", csv.str());
        run.file("epochs.json", "index", index.history.size(), "ok", json.str());
    } catch (const Error& e) {
        outcome.failures.push_back({"index", "", e.code(), e.what()});
    }
}

void write_manifest(const std::string_view command, const RunConfig& config,
                    const CommandOptions& options, RunOutcome& outcome) {
    nlohmann::ordered_json m;
    m["version"] = std::string(library_version());
    m["command"] = std::string(command);
    nlohmann::ordered_json opts = nlohmann::ordered_json::object();
    if (options.frequency) opts["frequency"] = std::string(to_string(*options.frequency));
    if (options.predictor) opts["predictor"] = *options.predictor;
    m["options"] = opts;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config.echo()) cfg[k] = v;
    m["config"] = cfg;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    const std::vector<std::pair<std::string, std::optional<std::filesystem::path>>> paths{
        {"prices", config.prices},
        {"tvl", config.tvl},
        {"network", config.network},
        {"attention", config.attention}};
    for (const auto& [name, path] : paths) {
        if (!path) continue;
        std::string label = path->filename().string();
        for (const auto& [k, v] : config.input_labels) {
            if (k == name) label = v;
        }
        nlohmann::ordered_json entry;
        entry["name"] = name;
        entry["path"] = label;
        try {
            entry["sha256"] = sha256_hex(read_bytes(*path));
        } catch (const Error&) {
            entry["sha256"] = nullptr;
        }
        inputs.push_back(entry);
    }
    m["inputs"] = inputs;
    nlohmann::ordered_json artifacts = nlohmann::ordered_json::array();
    for (const auto& a : outcome.artifacts) {
        artifacts.push_back({{"file", a.file},
                             {"table_id", a.table_id},
                             {"rows", a.rows},
                             {"status", a.status},
                             {"sha256", a.sha256}});
    }
    m["artifacts"] = artifacts;
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& f : outcome.failures) {
        failures.push_back({{"table_id", f.table_id},
                            {"row", f.row},
                            {"code", std::string(to_string(f.code))},
                            {"message", f.message}});
    }
    m["failures"] = failures;
    m["warnings"] = outcome.warnings;
    m["exit_code"] = outcome.exit_code;
    write_atomic(config.output_dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

RunOutcome run_command(std::string_view command, const RunConfig& config,
                       const CommandOptions& options) {
    RunOutcome outcome;
    const auto& commands = known_commands();
    if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
        outcome.exit_code = 2;
        outcome.fatal_message = "unknown command '" + std::string(command) + "'";
        return outcome;
    }
    try {
        std::filesystem::create_directories(config.output_dir);
    } catch (const std::filesystem::filesystem_error& e) {
        outcome.exit_code = 2;
        outcome.fatal_message = e.what();
        return outcome;
    }

    Pipeline p(config);
    Runner run(config, outcome);
    const Frequency f = options.frequency.value_or(config.frequency);
    const bool all = command == "all";
    try {
        p.panel();
        if (all || command == "build-index") build_index_files(p, run, outcome);
        if (all || command == "summary") run.table(p.summary_table());
        if (all || command == "correlations") {
            run.table(p.market_correlations());
            run.table(p.network_correlations());
        }
        if (all || command == "lagged-regressions") {
            if (options.predictor && !all) {
                run.table(p.lagged_regressions(*options.predictor, f));
            } else {
                for (const char* pred : {"btc", "eth", "crix"}) run.table(p.lagged_regressions(pred, f));
            }
        }
        if (all || command == "network") {
            run.table(p.network_exposure(f));
            for (auto v : {NetworkVariable::tvl, NetworkVariable::transactions, NetworkVariable::addresses}) {
                run.table(p.network_panel(v, false, f));
                run.table(p.network_panel(v, true, f));
            }
        }
        if (all || command == "attention") run.table(p.attention_regressions(f));
        if (all) {
            for (Frequency vf : {Frequency::weekly, Frequency::monthly}) {
                run.table(p.valuation_panel(false, vf));
                run.table(p.valuation_panel(true, vf));
            }
            run.table(p.valuation_scatter(f));
            run.table(p.valuation_fit(f));
        } else if (command == "valuation") {
            run.table(p.valuation_panel(false, f));
            run.table(p.valuation_panel(true, f));
            run.table(p.valuation_scatter(f));
            run.table(p.valuation_fit(f));
        }
        if (all || command == "cumulative") run.table(p.cumulative());
        if (all || command == "features") run.table(p.features(f));
        if (options.report) {
            std::string report = p.cleaning_report().to_json_lines();
            for (const auto& u : p.unmatched_reports()) report += u.to_json_lines();
            run.file("data_report.jsonl", "", static_cast<std::size_t>(std::count(report.begin(), report.end(), '\n')), "ok", report);
        }
    } catch (const Error& e) {
        outcome.exit_code = 2;
        outcome.fatal_message = e.what();
        outcome.failures.push_back({"", "", e.code(), e.what()});
    }

    std::vector<std::string> warnings = p.warnings();
    warnings.insert(warnings.end(), outcome.warnings.begin(), outcome.warnings.end());
    outcome.warnings = std::move(warnings);
    if (outcome.exit_code == 0 && !outcome.failures.empty()) outcome.exit_code = 1;
    try {
        write_manifest(command, config, options, outcome);
    } catch (const Error& e) {
        outcome.exit_code = 2;
        outcome.fatal_message = e.what();
    }
    return outcome;
}

}  // namespace defix
