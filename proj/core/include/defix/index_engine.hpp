#pragma once

// Value-weighted, divisor-chained market index (Laspeyres-type with
// per-constituent adjustment factors):
//
//   level_t = sum_i beta_i * P_{i,t} * Q_i / divisor
//   divisor = sum_i beta_i * P_{i,t*} * Q_i / target_level
//
// where t* is the epoch's effective date and target_level is the base value
// (1000) at inception or the prevailing level at each reconstitution.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "defix/date.hpp"
#include "defix/market_data.hpp"
#include "defix/series.hpp"

namespace defix {

inline constexpr double kIndexBaseValue = 1000.0;

struct Member {
    std::string symbol;
    double quantity = 0.0;  // token units
    double beta = 1.0;      // adjustment factor

    bool operator==(const Member&) const = default;
};

struct ConstituentSet {
    Date effective_date;
    std::vector<Member> members;  // ranked by market cap, descending

    bool operator==(const ConstituentSet&) const = default;
};

struct Divisor {
    double value = 0.0;
    Date effective_date;

    bool operator==(const Divisor&) const = default;
};

enum class Reconstitution { weekly, monthly, quarterly };

std::string_view to_string(Reconstitution r) noexcept;
Reconstitution parse_reconstitution(std::string_view text);

struct IndexConfig {
    double min_mcap = kDefaultMinMarketCap;
    /// Upper bound on members; must be a positive multiple of five when set.
    std::optional<std::size_t> target_count;
    /// A symbol is eligible only if it has a positive price on each of the
    /// last `lookback_days` calendar days ending at the selection date.
    std::size_t lookback_days = 1;
    double beta = 1.0;
    /// Symbols never admitted (benchmarks such as BTC or a foreign index).
    std::set<std::string> excluded;
};

struct Schedule {
    Reconstitution reconstitution = Reconstitution::monthly;
};

/// Ranks eligible symbols by market cap on `date` (ties by symbol) and takes
/// k = min(target_count, largest multiple of five <= eligible count).
/// Quantities are market_cap / price on `date`.
/// Throws Error{InsufficientEligible} with fewer than five eligible symbols.
ConstituentSet select_constituents(const TokenPanel& panel, Date date, const IndexConfig& config);

using PriceMap = std::map<std::string, double>;

/// Prices of every member of `set` on `d`. Throws Error{MissingPrice}.
PriceMap member_prices(const TokenPanel& panel, const ConstituentSet& set, Date d);

/// Throws Error{ZeroCapitalization} when sum beta*P*Q is zero and
/// Error{MissingPrice} when a member has no price.
Divisor compute_divisor(const ConstituentSet& set, const PriceMap& prices, double target_level);

/// Throws Error{MissingPrice} naming the symbol and date.
double index_level(const ConstituentSet& set, const Divisor& divisor, const PriceMap& prices,
                   Date t);

enum class EpochReason { inception, scheduled, forced };

std::string_view to_string(EpochReason r) noexcept;

struct Epoch {
    std::size_t id = 0;
    EpochReason reason = EpochReason::inception;
    ConstituentSet constituents;
    Divisor divisor;
    /// Level the new divisor was solved against (base value or the level
    /// computed under the previous set on the effective date).
    double anchor_level = 0.0;
};

struct IndexSeries {
    double base_value = kIndexBaseValue;
    Series levels;
    std::vector<std::size_t> epoch_ids;  // parallel to levels
    std::vector<Epoch> history;

    /// Distinct symbols that were ever a member.
    std::set<std::string> cumulative_members() const;
};

/// Deterministic daily index over the panel's calendar. Starts on the first
/// date with at least five eligible symbols, reconstitutes on the first
/// calendar date of each period, and chains the divisor so the level on a
/// reconstitution date is the same under the old and new sets. When a member
/// has no price on the next date, the set is rebuilt on the last valid day
/// without it (a forced epoch).
IndexSeries run_index(const TokenPanel& panel, const Schedule& schedule, const IndexConfig& config);

/// `date,level,epoch_id`
void write_index_csv(const IndexSeries& index, std::ostream& out);
/// Epoch history as a JSON array of
/// {effective_date, divisor, members[{symbol, quantity, beta}]}.
void write_epochs_json(const IndexSeries& index, std::ostream& out);

}  // namespace defix
