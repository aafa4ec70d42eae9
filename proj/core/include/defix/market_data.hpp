#pragma once

// Loading, validation, cleaning and resampling of the input datasets.
//
// CSV schemas (UTF-8, comma separated, ISO-8601 dates, '.' decimal, empty
// field = missing):
//   prices.csv:    date,symbol,close_usd,market_cap_usd,volume_usd
//   tvl.csv:       date,symbol,tvl_usd
//   network.csv:   date,symbol,address_count,transaction_count
//   attention.csv: week_start,term,interest

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "defix/date.hpp"
#include "defix/series.hpp"

namespace defix {

struct Observation {
    Date date;
    std::optional<double> price;       // USD per token
    std::optional<double> market_cap;  // USD
    std::optional<double> volume;      // USD per day

    bool operator==(const Observation&) const = default;
};

struct NetworkCounts {
    std::optional<double> address_count;
    std::optional<double> transaction_count;

    bool operator==(const NetworkCounts&) const = default;
};

/// Canonical container for every per-token input. Price rows are kept per
/// symbol in strictly increasing date order; TVL and network extensions are
/// keyed by the same (symbol, date) pairs and may cover symbols that have no
/// price rows at all.
struct TokenPanel {
    Frequency frequency = Frequency::daily;
    std::map<std::string, std::vector<Observation>> rows;
    std::map<std::string, std::map<Date, double>> tvl;
    std::map<std::string, std::map<Date, NetworkCounts>> network;

    std::set<std::string> symbols() const;
    const Observation* find(const std::string& symbol, Date d) const;
    /// Union of all price-row dates, sorted.
    std::vector<Date> calendar() const;

    Series price_series(const std::string& symbol) const;
    Series market_cap_series(const std::string& symbol) const;
    Series tvl_series(const std::string& symbol) const;
    Series address_series(const std::string& symbol) const;
    Series transaction_series(const std::string& symbol) const;

    bool operator==(const TokenPanel&) const = default;
};

struct AttentionSeries {
    std::string term;
    Series interest;  // dated by week_start, values in [0, 100]
};

/// Extension rows whose symbol has no price history.
struct UnmatchedReport {
    std::string source;
    std::map<std::string, std::size_t> rows_by_symbol;

    std::string to_json_lines() const;
};

/// Throws Error{MissingColumn, DuplicateKey, NegativeValue, BadDate, BadNumber}
/// with the offending row number.
TokenPanel ingest_prices(std::istream& source);

/// Attaches TVL rows to `panel`. Unmatched symbols are kept and reported.
UnmatchedReport ingest_tvl(std::istream& source, TokenPanel& panel);
UnmatchedReport ingest_network(std::istream& source, TokenPanel& panel);

/// One series per term, in order of first appearance. Week starts of a term
/// must be exactly 7 days apart.
std::vector<AttentionSeries> ingest_attention(std::istream& source);

enum class MissingPolicy { drop_missing, forward_fill };

struct CleaningReport {
    struct Entry {
        std::string symbol;
        std::size_t rows_in = 0;
        std::size_t rows_dropped = 0;
        std::size_t rows_filled = 0;
        bool symbol_dropped = false;
    };
    std::vector<Entry> entries;

    std::string to_json_lines() const;
};

struct CleanResult {
    TokenPanel panel;
    CleaningReport report;
};

/// Removes rows without a price (or forward-fills price and market cap when
/// asked). Symbols left with no rows are dropped. Idempotent.
CleanResult clean_panel(const TokenPanel& panel,
                        MissingPolicy policy = MissingPolicy::drop_missing);

inline constexpr double kDefaultMinMarketCap = 1'000'000.0;

/// Keeps symbols whose market cap on `evaluation_date` is >= threshold.
/// Throws Error{InvalidConfig} for a non-positive threshold.
TokenPanel filter_min_mcap(const TokenPanel& panel, Date evaluation_date,
                           double threshold = kDefaultMinMarketCap);

enum class Aggregation {
    last,      // level series: last observation in the bucket
    compound,  // simple returns: prod(1 + r) - 1
    sum,       // log growths
};

/// Daily series to weekly (Sunday-start) or monthly buckets, labelled by the
/// bucket's first day. Buckets between the first and last observation that
/// contain no value are emitted as missing. Missing daily values are skipped.
Series resample(const Series& daily, Frequency to, Aggregation how);

void write_prices_csv(const TokenPanel& panel, std::ostream& out);
void write_tvl_csv(const TokenPanel& panel, std::ostream& out);
void write_network_csv(const TokenPanel& panel, std::ostream& out);
void write_attention_csv(const std::vector<AttentionSeries>& series, std::ostream& out);

}  // namespace defix
