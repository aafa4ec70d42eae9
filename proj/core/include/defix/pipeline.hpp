#pragma once

// Configuration-driven experiment suite: loads the inputs once, builds the
// index lazily and renders every result table. `run_command` is what the CLI
// calls; the Pipeline methods are exposed so each table can be produced and
// inspected in isolation.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "defix/config.hpp"
#include "defix/error.hpp"
#include "defix/index_engine.hpp"
#include "defix/market_data.hpp"
#include "defix/stats.hpp"
#include "defix/tables.hpp"

namespace defix {

std::string_view library_version() noexcept;

/// Name under which the index itself appears in tables and level lookups.
inline constexpr std::string_view kIndexName = "DeFiX";

/// A single row (or whole table) that could not be produced.
struct Failure {
    std::string table_id;
    std::string row;  // empty when the whole table failed
    ErrorCode code;
    std::string message;
};

struct TableOutput {
    Table table;
    std::vector<Failure> failures;
    std::vector<std::string> warnings;
    /// True when no row at all could be produced.
    bool failed = false;
};

enum class NetworkVariable { tvl, transactions, addresses };
std::string_view to_string(NetworkVariable v) noexcept;

class Pipeline {
public:
    explicit Pipeline(RunConfig config);

    const RunConfig& config() const noexcept { return config_; }

    /// Cleaned panel with TVL and network extensions attached.
    const TokenPanel& panel();
    const CleaningReport& cleaning_report();
    const std::vector<UnmatchedReport>& unmatched_reports();
    const std::vector<AttentionSeries>& attention();
    const IndexSeries& index();

    /// Daily levels: the index for kIndexName, the close price otherwise.
    Series levels(std::string_view name);
    ReturnSeries returns(std::string_view name, Frequency frequency);

    /// Resolved token universes (benchmarks excluded, symbol order unless the
    /// list was given explicitly).
    std::vector<std::string> major_tokens();
    std::vector<std::string> tvl_tokens();
    std::vector<std::string> network_tokens();

    /// Per-token growth of a network variable: daily log differences,
    /// summed into buckets for weekly or monthly frequency.
    Series network_growth(const std::string& symbol, NetworkVariable v, Frequency frequency);
    /// Cross-sectional mean of network_growth over the variable's universe.
    Series network_factor(NetworkVariable v, Frequency frequency);
    /// TVL / market cap, last value per bucket.
    Series valuation_ratio_series(const std::string& symbol, Frequency frequency);

    TableOutput summary_table();
    TableOutput market_correlations();   // t2
    TableOutput network_correlations();  // t6
    /// "btc", "eth" or "crix" -> t3, t4, t5.
    TableOutput lagged_regressions(std::string_view predictor, Frequency frequency);
    TableOutput network_exposure(Frequency frequency);  // t7
    /// t8..t13
    TableOutput network_panel(NetworkVariable v, bool major_only, Frequency frequency);
    TableOutput attention_regressions(Frequency frequency);  // t14
    /// t15/t16 for weekly, d1/d2 for monthly.
    TableOutput valuation_panel(bool major_only, Frequency frequency);
    TableOutput valuation_scatter(Frequency frequency);  // fig2
    TableOutput valuation_fit(Frequency frequency);      // fig2_fit
    TableOutput cumulative();                            // fig1
    TableOutput features(Frequency frequency);

    std::vector<std::string> warnings() const { return warnings_; }

private:
    void load();

    RunConfig config_;
    bool loaded_ = false;
    TokenPanel panel_;
    CleaningReport cleaning_;
    std::vector<UnmatchedReport> unmatched_;
    std::vector<AttentionSeries> attention_;
    std::optional<IndexSeries> index_;
    std::optional<Error> index_error_;
    std::vector<std::string> warnings_;
    std::map<std::pair<std::string, int>, ReturnSeries> return_cache_;
};

struct CommandOptions {
    std::optional<Frequency> frequency;
    std::optional<std::string> predictor;
    bool report = false;
};

struct ArtifactRecord {
    std::string file;
    std::string table_id;
    std::size_t rows = 0;
    std::string status;  // ok, partial, failed
    std::string sha256;
};

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 1 some table or row failed, 2 fatal
    std::vector<ArtifactRecord> artifacts;
    std::vector<Failure> failures;
    std::vector<std::string> warnings;
    std::string fatal_message;
};

const std::vector<std::string>& known_commands();

/// Runs one CLI command and writes its artifacts plus manifest.json into
/// config.output_dir. Never throws for data problems; they end up in the
/// outcome and the manifest.
RunOutcome run_command(std::string_view command, const RunConfig& config,
                       const CommandOptions& options = {});

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace defix
