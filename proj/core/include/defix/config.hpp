#pragma once

// Run configuration. The file is INI-style:
//
//   [inputs]    prices, tvl, network, attention   (paths, relative to the file)
//   [index]     min_mcap, reconstitution, target_count, lookback_days, beta, exclude
//   [analysis]  frequency, lags_crypto, lags_network, lags_attention,
//               lags_valuation, btc, eth, crix, attention_terms, attention_labels,
//               missing_policy
//   [tokens]    major, major_rule (fixed | avg_mcap), major_count,
//               major_window_days, all_tvl, all_network
//   [output]    dir
//
// Lists are comma separated. OUTPUT_DIR in the environment overrides
// [output] dir; a command-line --out overrides both.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "defix/date.hpp"
#include "defix/index_engine.hpp"
#include "defix/market_data.hpp"

namespace defix {

enum class MajorRule { fixed, avg_mcap };

struct RunConfig {
    std::filesystem::path prices;
    std::optional<std::filesystem::path> tvl;
    std::optional<std::filesystem::path> network;
    std::optional<std::filesystem::path> attention;

    IndexConfig index;
    Schedule schedule;

    Frequency frequency = Frequency::weekly;
    std::vector<int> lags_crypto{1, 2};
    std::vector<int> lags_network{1, 2, 3, 4};
    std::vector<int> lags_attention{1, 2, 3};
    std::vector<int> lags_valuation{1, 2, 3, 4};
    MissingPolicy missing_policy = MissingPolicy::drop_missing;

    std::string btc = "BTC";
    std::string eth = "ETH";
    std::string crix = "CRIX";
    std::vector<std::string> attention_terms{"Decentralized finance", "DeFi"};
    std::vector<std::string> attention_labels{"dcfin", "DeFi"};

    MajorRule major_rule = MajorRule::fixed;
    std::vector<std::string> major;
    std::size_t major_count = 15;
    std::size_t major_window_days = 100;
    /// Empty means every symbol that has the respective data.
    std::vector<std::string> all_tvl;
    std::vector<std::string> all_network;

    std::filesystem::path output_dir = "out";

    /// Resolved key/value pairs, in a stable order, for the run manifest.
    std::vector<std::pair<std::string, std::string>> echo() const;
    /// Input paths exactly as written in the file (for the manifest).
    std::vector<std::pair<std::string, std::string>> input_labels;
};

/// The fifteen large DeFi tokens used as the default major list.
const std::vector<std::string>& default_major_tokens();

/// Throws Error{InvalidConfig} for malformed values or missing input files.
RunConfig load_config(const std::filesystem::path& file);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

/// Checks invariants: input files exist, lag sets non-empty, min_mcap > 0.
void validate(const RunConfig& config);

}  // namespace defix
