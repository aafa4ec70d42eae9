#include "defix/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "csv.hpp"
#include "defix/error.hpp"

namespace defix {

// ─── TokenPanel accessors ────────────────────────────────────────────────────

std::set<std::string> TokenPanel::symbols() const {
    std::set<std::string> out;
    for (const auto& [sym, obs] : rows) out.insert(sym);
    return out;
}

const Observation* TokenPanel::find(const std::string& symbol, Date d) const {
    const auto it = rows.find(symbol);
    if (it == rows.end()) return nullptr;
    const auto& v = it->second;
    const auto pos = std::lower_bound(v.begin(), v.end(), d,
                                      [](const Observation& o, Date x) { return o.date < x; });
    if (pos == v.end() || pos->date != d) return nullptr;
    return &*pos;
}

std::vector<Date> TokenPanel::calendar() const {
    std::vector<Date> out;
    for (const auto& [sym, obs] : rows) {
        for (const auto& o : obs) out.push_back(o.date);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

template <class Field>
Series observation_series(const TokenPanel& p, const std::string& symbol, Field field) {
    Series s;
    const auto it = p.rows.find(symbol);
    if (it == p.rows.end()) return s;
    for (const auto& o : it->second) s.push_back(o.date, field(o).value_or(kMissing));
    return s;
}

template <class Field>
Series network_series(const TokenPanel& p, const std::string& symbol, Field field) {
    Series s;
    const auto it = p.network.find(symbol);
    if (it == p.network.end()) return s;
    for (const auto& [d, counts] : it->second) s.push_back(d, field(counts).value_or(kMissing));
    return s;
}

}  // namespace

Series TokenPanel::price_series(const std::string& symbol) const {
    return observation_series(*this, symbol, [](const Observation& o) { return o.price; });
}

Series TokenPanel::market_cap_series(const std::string& symbol) const {
    return observation_series(*this, symbol, [](const Observation& o) { return o.market_cap; });
}

Series TokenPanel::tvl_series(const std::string& symbol) const {
    Series s;
    const auto it = tvl.find(symbol);
    if (it == tvl.end()) return s;
    for (const auto& [d, v] : it->second) s.push_back(d, v);
    return s;
}

Series TokenPanel::address_series(const std::string& symbol) const {
    return network_series(*this, symbol, [](const NetworkCounts& c) { return c.address_count; });
}

Series TokenPanel::transaction_series(const std::string& symbol) const {
    return network_series(*this, symbol,
                          [](const NetworkCounts& c) { return c.transaction_count; });
}

// ─── ingestion ───────────────────────────────────────────────────────────────

namespace {

std::optional<double> non_negative(const csv::Reader& r, std::string_view column) {
    auto v = csv::parse_optional_number(r.field(column), column, r.line());
    if (v && *v < 0.0) {
        throw Error(ErrorCode::NegativeValue,
                    "column '" + std::string(column) + "' is negative: " + std::string(r.field(column)),
                    r.line());
    }
    return v;
}

Date row_date(const csv::Reader& r, std::string_view column) {
    try {
        return parse_date(r.field(column));
    } catch (const Error& e) {
        throw Error(ErrorCode::BadDate, e.what(), r.line());
    }
}

std::string row_symbol(const csv::Reader& r, std::string_view column) {
    std::string s(r.field(column));
    if (s.empty()) {
        throw Error(ErrorCode::SchemaMismatch, "empty '" + std::string(column) + "'", r.line());
    }
    return s;
}

std::string duplicate_message(const std::string& symbol, Date d, std::size_t first_row) {
    return "(" + symbol + ", " + format_date(d) + ") already seen at row " +
           std::to_string(first_row);
}

}  // namespace

TokenPanel ingest_prices(std::istream& source) {
    csv::Reader reader(source, {"date", "symbol", "close_usd", "market_cap_usd", "volume_usd"});
    TokenPanel panel;
    std::map<std::string, std::map<Date, std::pair<Observation, std::size_t>>> staged;
    while (reader.next()) {
        Observation o;
        o.date = row_date(reader, "date");
        const std::string symbol = row_symbol(reader, "symbol");
        o.price = non_negative(reader, "close_usd");
        o.market_cap = non_negative(reader, "market_cap_usd");
        o.volume = non_negative(reader, "volume_usd");
        auto& by_date = staged[symbol];
        const auto [it, inserted] = by_date.try_emplace(o.date, o, reader.line());
        if (!inserted) {
            throw Error(ErrorCode::DuplicateKey,
                        duplicate_message(symbol, o.date, it->second.second), reader.line());
        }
    }
    for (auto& [symbol, by_date] : staged) {
        auto& out = panel.rows[symbol];
        out.reserve(by_date.size());
        for (auto& [d, entry] : by_date) out.push_back(entry.first);
    }
    return panel;
}

UnmatchedReport ingest_tvl(std::istream& source, TokenPanel& panel) {
    csv::Reader reader(source, {"date", "symbol", "tvl_usd"});
    UnmatchedReport report{"tvl", {}};
    std::map<std::pair<std::string, Date>, std::size_t> seen;
    std::map<std::string, std::map<Date, double>> staged;
    while (reader.next()) {
        const Date d = row_date(reader, "date");
        const std::string symbol = row_symbol(reader, "symbol");
        const auto v = non_negative(reader, "tvl_usd");
        const auto [it, inserted] = seen.try_emplace({symbol, d}, reader.line());
        if (!inserted || panel.tvl[symbol].count(d) != 0) {
            throw Error(ErrorCode::DuplicateKey, duplicate_message(symbol, d, it->second),
                        reader.line());
        }
        if (v) staged[symbol][d] = *v;
        if (panel.rows.count(symbol) == 0) ++report.rows_by_symbol[symbol];
    }
    for (auto& [symbol, by_date] : staged) panel.tvl[symbol].merge(by_date);
    std::erase_if(panel.tvl, [](const auto& kv) { return kv.second.empty(); });
    return report;
}

UnmatchedReport ingest_network(std::istream& source, TokenPanel& panel) {
    csv::Reader reader(source, {"date", "symbol", "address_count", "transaction_count"});
    UnmatchedReport report{"network", {}};
    std::map<std::pair<std::string, Date>, std::size_t> seen;
    std::map<std::string, std::map<Date, NetworkCounts>> staged;
    while (reader.next()) {
        const Date d = row_date(reader, "date");
        const std::string symbol = row_symbol(reader, "symbol");
        NetworkCounts c;
        c.address_count = non_negative(reader, "address_count");
        c.transaction_count = non_negative(reader, "transaction_count");
        const auto [it, inserted] = seen.try_emplace({symbol, d}, reader.line());
        if (!inserted || panel.network[symbol].count(d) != 0) {
            throw Error(ErrorCode::DuplicateKey, duplicate_message(symbol, d, it->second),
                        reader.line());
        }
        if (c.address_count || c.transaction_count) staged[symbol][d] = c;
        if (panel.rows.count(symbol) == 0) ++report.rows_by_symbol[symbol];
    }
    for (auto& [symbol, by_date] : staged) panel.network[symbol].merge(by_date);
    std::erase_if(panel.network, [](const auto& kv) { return kv.second.empty(); });
    return report;
}

std::vector<AttentionSeries> ingest_attention(std::istream& source) {
    csv::Reader reader(source, {"week_start", "term", "interest"});
    std::vector<AttentionSeries> out;
    std::unordered_map<std::string, std::size_t> index;
    while (reader.next()) {
        const Date d = row_date(reader, "week_start");
        const std::string term = row_symbol(reader, "term");
        const auto v = csv::parse_optional_number(reader.field("interest"), "interest", reader.line());
        if (!v) {
            throw Error(ErrorCode::SchemaMismatch, "missing interest value", reader.line());
        }
        if (*v != std::floor(*v)) {
            throw Error(ErrorCode::BadNumber, "interest must be an integer", reader.line());
        }
        if (*v < 0.0 || *v > 100.0) {
            throw Error(ErrorCode::InterestOutOfRange,
                        "interest " + std::string(reader.field("interest")) + " outside [0, 100]",
                        reader.line());
        }
        auto [it, inserted] = index.try_emplace(term, out.size());
        if (inserted) out.push_back(AttentionSeries{term, {}});
        auto& series = out[it->second].interest;
        if (!series.empty()) {
            if (d == series.dates.back()) {
                throw Error(ErrorCode::DuplicateKey,
                            "(" + term + ", " + format_date(d) + ") repeated", reader.line());
            }
            if (d - series.dates.back() != std::chrono::days{7}) {
                throw Error(ErrorCode::SchemaMismatch,
                            "week_start " + format_date(d) + " is not 7 days after " +
                                format_date(series.dates.back()),
                            reader.line());
            }
        }
        series.push_back(d, *v);
    }
    return out;
}

std::string UnmatchedReport::to_json_lines() const {
    std::string out;
    for (const auto& [symbol, n] : rows_by_symbol) {
        nlohmann::ordered_json j;
        j["event"] = "unmatched";
        j["source"] = source;
        j["symbol"] = symbol;
        j["rows"] = n;
        out += j.dump();
        out += '\n';
    }
    return out;
}

// ─── cleaning and filtering ──────────────────────────────────────────────────

CleanResult clean_panel(const TokenPanel& panel, MissingPolicy policy) {
    CleanResult result;
    result.panel.frequency = panel.frequency;
    for (const auto& [symbol, obs] : panel.rows) {
        CleaningReport::Entry entry{symbol, obs.size(), 0, 0, false};
        std::vector<Observation> kept;
        kept.reserve(obs.size());
        std::optional<double> last_price, last_mcap;
        for (const auto& o : obs) {
            if (o.price) {
                kept.push_back(o);
                last_price = o.price;
                if (o.market_cap) last_mcap = o.market_cap;
                else if (policy == MissingPolicy::forward_fill && last_mcap) {
                    kept.back().market_cap = last_mcap;
                    ++entry.rows_filled;
                }
                continue;
            }
            if (policy == MissingPolicy::forward_fill && last_price) {
                Observation filled = o;
                filled.price = last_price;
                if (!filled.market_cap) filled.market_cap = last_mcap;
                else last_mcap = filled.market_cap;
                kept.push_back(filled);
                ++entry.rows_filled;
                continue;
            }
            ++entry.rows_dropped;
        }
        if (kept.empty()) {
            entry.symbol_dropped = true;
        } else {
            result.panel.rows.emplace(symbol, std::move(kept));
        }
        result.report.entries.push_back(entry);
    }
    result.panel.tvl = panel.tvl;
    result.panel.network = panel.network;
    return result;
}

std::string CleaningReport::to_json_lines() const {
    std::string out;
    for (const auto& e : entries) {
        nlohmann::ordered_json j;
        j["event"] = e.symbol_dropped ? "symbol_dropped" : "cleaned";
        j["symbol"] = e.symbol;
        j["rows_in"] = e.rows_in;
        j["rows_dropped"] = e.rows_dropped;
        j["rows_filled"] = e.rows_filled;
        out += j.dump();
        out += '\n';
    }
    return out;
}

TokenPanel filter_min_mcap(const TokenPanel& panel, Date evaluation_date, double threshold) {
    if (!(threshold > 0.0) || !std::isfinite(threshold)) {
        throw Error(ErrorCode::InvalidConfig, "min_mcap threshold must be positive");
    }
    TokenPanel out;
    out.frequency = panel.frequency;
    for (const auto& [symbol, obs] : panel.rows) {
        const Observation* o = panel.find(symbol, evaluation_date);
        if (o == nullptr || !o->market_cap || *o->market_cap < threshold) continue;
        out.rows.emplace(symbol, obs);
        if (auto it = panel.tvl.find(symbol); it != panel.tvl.end()) out.tvl.insert(*it);
        if (auto it = panel.network.find(symbol); it != panel.network.end()) {
            out.network.insert(*it);
        }
    }
    return out;
}

// ─── resampling ──────────────────────────────────────────────────────────────

Series resample(const Series& daily, Frequency to, Aggregation how) {
    if (to == Frequency::daily) return daily;
    Series out;
    if (daily.empty()) return out;

    Date bucket = bucket_start(daily.dates.front(), to);
    const Date last_bucket = bucket_start(daily.dates.back(), to);
    std::size_t i = 0;
    while (bucket <= last_bucket) {
        const Date next = shift_bucket(bucket, to, 1);
        double acc = how == Aggregation::compound ? 1.0 : 0.0;
        double last = kMissing;
        std::size_t count = 0;
        for (; i < daily.size() && daily.dates[i] < next; ++i) {
            const double v = daily.values[i];
            if (is_missing(v)) continue;
            ++count;
            switch (how) {
            case Aggregation::last: last = v; break;
            case Aggregation::compound: acc *= 1.0 + v; break;
            case Aggregation::sum: acc += v; break;
            }
        }
        double value = kMissing;
        if (count > 0) {
            value = how == Aggregation::last       ? last
                    : how == Aggregation::compound ? acc - 1.0
                                                   : acc;
        }
        out.push_back(bucket, value);
        bucket = next;
    }
    return out;
}

// ─── writers ─────────────────────────────────────────────────────────────────

namespace {

std::string opt(const std::optional<double>& v) {
    return v ? csv::format_exact(*v) : std::string{};
}

}  // namespace

void write_prices_csv(const TokenPanel& panel, std::ostream& out) {
    out << "date,symbol,close_usd,market_cap_usd,volume_usd\n";
    for (const auto& [symbol, obs] : panel.rows) {
        for (const auto& o : obs) {
            out << format_date(o.date) << ',' << csv::quote_if_needed(symbol) << ',' << opt(o.price)
                << ',' << opt(o.market_cap) << ',' << opt(o.volume) << '\n';
        }
    }
}

void write_tvl_csv(const TokenPanel& panel, std::ostream& out) {
    out << "date,symbol,tvl_usd\n";
    for (const auto& [symbol, by_date] : panel.tvl) {
        for (const auto& [d, v] : by_date) {
            out << format_date(d) << ',' << csv::quote_if_needed(symbol) << ','
                << csv::format_exact(v) << '\n';
        }
    }
}

void write_network_csv(const TokenPanel& panel, std::ostream& out) {
    out << "date,symbol,address_count,transaction_count\n";
    for (const auto& [symbol, by_date] : panel.network) {
        for (const auto& [d, c] : by_date) {
            out << format_date(d) << ',' << csv::quote_if_needed(symbol) << ','
                << opt(c.address_count) << ',' << opt(c.transaction_count) << '\n';
        }
    }
}

void write_attention_csv(const std::vector<AttentionSeries>& series, std::ostream& out) {
    out << "week_start,term,interest\n";
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.interest.size(); ++i) {
            out << format_date(s.interest.dates[i]) << ',' << csv::quote_if_needed(s.term) << ','
                << csv::format_exact(s.interest.values[i]) << '\n';
        }
    }
}

}  // namespace defix
