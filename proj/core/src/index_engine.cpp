#include "defix/index_engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "csv.hpp"
#include "defix/error.hpp"

namespace defix {

std::string_view to_string(Reconstitution r) noexcept {
    switch (r) {
    case Reconstitution::weekly: return "weekly";
    case Reconstitution::monthly: return "monthly";
    case Reconstitution::quarterly: return "quarterly";
    }
    return "monthly";
}

Reconstitution parse_reconstitution(std::string_view text) {
    if (text == "weekly") return Reconstitution::weekly;
    if (text == "monthly") return Reconstitution::monthly;
    if (text == "quarterly") return Reconstitution::quarterly;
    throw Error(ErrorCode::InvalidConfig, "unknown reconstitution cadence '" + std::string(text) + "'");
}

std::string_view to_string(EpochReason r) noexcept {
    switch (r) {
    case EpochReason::inception: return "inception";
    case EpochReason::scheduled: return "scheduled";
    case EpochReason::forced: return "forced";
    }
    return "inception";
}

std::set<std::string> IndexSeries::cumulative_members() const {
    std::set<std::string> out;
    for (const auto& e : history) {
        for (const auto& m : e.constituents.members) out.insert(m.symbol);
    }
    return out;
}

namespace {

bool priced(const Observation* o) { return o != nullptr && o->price && *o->price > 0.0; }

ConstituentSet select_impl(const TokenPanel& panel, Date date, const IndexConfig& config,
                           const std::set<std::string>& also_excluded) {
    if (!(config.min_mcap > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "min_mcap must be positive");
    }
    if (!(config.beta > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "beta must be positive");
    }
    if (config.target_count && (*config.target_count == 0 || *config.target_count % 5 != 0)) {
        throw Error(ErrorCode::InvalidConfig, "target_count must be a positive multiple of five");
    }
    const std::size_t lookback = std::max<std::size_t>(config.lookback_days, 1);

    struct Candidate {
        const std::string* symbol;
        double mcap;
        double price;
    };
    std::vector<Candidate> eligible;
    for (const auto& [symbol, obs] : panel.rows) {
        if (config.excluded.count(symbol) || also_excluded.count(symbol)) continue;
        const Observation* o = panel.find(symbol, date);
        if (!priced(o) || !o->market_cap || *o->market_cap < config.min_mcap) continue;
        bool complete = true;
        for (std::size_t back = 1; back < lookback && complete; ++back) {
            complete = priced(panel.find(symbol, date - std::chrono::days{back}));
        }
        if (!complete) continue;
        eligible.push_back({&symbol, *o->market_cap, *o->price});
    }
    if (eligible.size() < 5) {
        throw Error(ErrorCode::InsufficientEligible,
                    std::to_string(eligible.size()) + " eligible symbols on " + format_date(date) +
                        " (need at least 5)");
    }
    std::sort(eligible.begin(), eligible.end(), [](const Candidate& a, const Candidate& b) {
        if (a.mcap != b.mcap) return a.mcap > b.mcap;
        return *a.symbol < *b.symbol;
    });
    std::size_t k = eligible.size() - eligible.size() % 5;
    if (config.target_count) k = std::min(k, *config.target_count);

    ConstituentSet set;
    set.effective_date = date;
    set.members.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        set.members.push_back({*eligible[i].symbol, eligible[i].mcap / eligible[i].price, config.beta});
    }
    return set;
}

double capitalization(const ConstituentSet& set, const PriceMap& prices, Date t) {
    double total = 0.0;
    for (const auto& m : set.members) {
        const auto it = prices.find(m.symbol);
        if (it == prices.end() || is_missing(it->second)) {
            throw Error(ErrorCode::MissingPrice, m.symbol + " has no price on " + format_date(t));
        }
        total += m.beta * it->second * m.quantity;
    }
    return total;
}

}  // namespace

ConstituentSet select_constituents(const TokenPanel& panel, Date date, const IndexConfig& config) {
    return select_impl(panel, date, config, {});
}

PriceMap member_prices(const TokenPanel& panel, const ConstituentSet& set, Date d) {
    PriceMap out;
    for (const auto& m : set.members) {
        const Observation* o = panel.find(m.symbol, d);
        if (o == nullptr || !o->price) {
            throw Error(ErrorCode::MissingPrice, m.symbol + " has no price on " + format_date(d));
        }
        out.emplace(m.symbol, *o->price);
    }
    return out;
}

Divisor compute_divisor(const ConstituentSet& set, const PriceMap& prices, double target_level) {
    if (!(target_level > 0.0) || !std::isfinite(target_level)) {
        throw Error(ErrorCode::InvalidConfig, "target level must be positive");
    }
    const double cap = capitalization(set, prices, set.effective_date);
    if (cap == 0.0) {
        throw Error(ErrorCode::ZeroCapitalization,
                    "adjusted capitalization is zero on " + format_date(set.effective_date));
    }
    return Divisor{cap / target_level, set.effective_date};
}

double index_level(const ConstituentSet& set, const Divisor& divisor, const PriceMap& prices,
                   Date t) {
    if (!(divisor.value > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "divisor must be positive");
    }
    return capitalization(set, prices, t) / divisor.value;
}

namespace {

Date period_of(Date d, Reconstitution r) {
    switch (r) {
    case Reconstitution::weekly: return week_start(d);
    case Reconstitution::monthly: return month_start(d);
    case Reconstitution::quarterly: {
        const std::chrono::year_month_day ymd{d};
        const unsigned m = static_cast<unsigned>(ymd.month());
        return make_date(static_cast<int>(ymd.year()), m - (m - 1) % 3, 1);
    }
    }
    return d;
}

std::set<std::string> unpriced_members(const TokenPanel& panel, const ConstituentSet& set, Date d) {
    std::set<std::string> out;
    for (const auto& m : set.members) {
        const Observation* o = panel.find(m.symbol, d);
        if (o == nullptr || !o->price) out.insert(m.symbol);
    }
    return out;
}

}  // namespace

IndexSeries run_index(const TokenPanel& panel, const Schedule& schedule, const IndexConfig& config) {
    std::vector<Date> calendar;
    {
        TokenPanel universe;
        for (const auto& [symbol, obs] : panel.rows) {
            if (!config.excluded.count(symbol)) universe.rows.emplace(symbol, obs);
        }
        calendar = universe.calendar();
    }

    IndexSeries index;
    std::size_t start = 0;
    ConstituentSet current;
    for (; start < calendar.size(); ++start) {
        try {
            current = select_constituents(panel, calendar[start], config);
            break;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InsufficientEligible) throw;
        }
    }
    if (start == calendar.size()) {
        throw Error(ErrorCode::InsufficientEligible, "no date has at least 5 eligible symbols");
    }

    const Date inception = calendar[start];
    Divisor divisor = compute_divisor(current, member_prices(panel, current, inception),
                                      index.base_value);
    index.history.push_back({0, EpochReason::inception, current, divisor, index.base_value});
    // The base value is emitted by definition rather than recomputed.
    index.levels.push_back(inception, index.base_value);
    index.epoch_ids.push_back(0);

    auto open_epoch = [&](EpochReason reason, ConstituentSet set, Date effective, double anchor) {
        set.effective_date = effective;
        divisor = compute_divisor(set, member_prices(panel, set, effective), anchor);
        current = std::move(set);
        index.history.push_back({index.history.size(), reason, current, divisor, anchor});
    };

    for (std::size_t i = start + 1; i < calendar.size(); ++i) {
        const Date t = calendar[i];
        const Date previous = calendar[i - 1];

        if (auto lost = unpriced_members(panel, current, t); !lost.empty()) {
            // Rebuild on the last day every member was priced, without the
            // symbols that drop out, so `t` can be evaluated.
            std::set<std::string> unavailable;
            for (const auto& [symbol, obs] : panel.rows) {
                const Observation* o = panel.find(symbol, t);
                if (o == nullptr || !o->price) unavailable.insert(symbol);
            }
            open_epoch(EpochReason::forced, select_impl(panel, previous, config, unavailable),
                       previous, index.levels.values.back());
        }

        const double level = index_level(current, divisor, member_prices(panel, current, t), t);
        if (period_of(t, schedule.reconstitution) != period_of(previous, schedule.reconstitution)) {
            open_epoch(EpochReason::scheduled, select_constituents(panel, t, config), t, level);
        }
        index.levels.push_back(t, level);
        index.epoch_ids.push_back(index.history.back().id);
    }
    return index;
}

void write_index_csv(const IndexSeries& index, std::ostream& out) {
    out << "date,level,epoch_id\n";
    for (std::size_t i = 0; i < index.levels.size(); ++i) {
        out << format_date(index.levels.dates[i]) << ',' << csv::format_exact(index.levels.values[i])
            << ',' << index.epoch_ids[i] << '\n';
    }
}

void write_epochs_json(const IndexSeries& index, std::ostream& out) {
    auto doc = nlohmann::ordered_json::array();
    for (const auto& e : index.history) {
        nlohmann::ordered_json j;
        j["epoch_id"] = e.id;
        j["reason"] = std::string(to_string(e.reason));
        j["effective_date"] = format_date(e.divisor.effective_date);
        j["divisor"] = e.divisor.value;
        j["anchor_level"] = e.anchor_level;
        auto members = nlohmann::ordered_json::array();
        for (const auto& m : e.constituents.members) {
            nlohmann::ordered_json mj;
            mj["symbol"] = m.symbol;
            mj["quantity"] = m.quantity;
            mj["beta"] = m.beta;
            members.push_back(std::move(mj));
        }
        j["members"] = std::move(members);
        doc.push_back(std::move(j));
    }
    out << doc.dump(2) << '\n';
}

}  // namespace defix
