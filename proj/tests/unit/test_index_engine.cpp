#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "defix/error.hpp"
#include "defix/index_engine.hpp"
#include "synthetic.hpp"

using namespace defix;

namespace {

const Date kDay = make_date(2021, 3, 1);

/// n tokens priced on `kDay` with caps 1e8 * (n - i) so T000 is largest.
TokenPanel ranked_panel(std::size_t n) {
    TokenPanel p;
    for (std::size_t i = 0; i < n; ++i) {
        p.rows[synth::token_name(i)] = {{kDay, 2.0, 1e8 * static_cast<double>(n - i), 1.0}};
    }
    return p;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Io;
}

ConstituentSet single_member(double quantity) {
    return {kDay, {{"AAA", quantity, 1.0}}};
}

}  // namespace

TEST_CASE("select: membership is the largest multiple of five") {
    CHECK(select_constituents(ranked_panel(12), kDay, {}).members.size() == 10);
    CHECK(select_constituents(ranked_panel(5), kDay, {}).members.size() == 5);
    CHECK(code_of([] { select_constituents(ranked_panel(4), kDay, {}); }) ==
          ErrorCode::InsufficientEligible);

    IndexConfig big;
    big.target_count = 95;
    CHECK(select_constituents(ranked_panel(95), kDay, big).members.size() == 95);
    CHECK(select_constituents(ranked_panel(120), kDay, big).members.size() == 95);

    IndexConfig small;
    small.target_count = 5;
    const auto set = select_constituents(ranked_panel(12), kDay, small);
    REQUIRE(set.members.size() == 5);
    CHECK(set.members.front().symbol == "T000");
    CHECK(set.members.back().symbol == "T004");
}

TEST_CASE("select: target count must be a positive multiple of five") {
    IndexConfig c;
    c.target_count = 7;
    CHECK(code_of([&] { select_constituents(ranked_panel(12), kDay, c); }) == ErrorCode::InvalidConfig);
    c.target_count = 0;
    CHECK(code_of([&] { select_constituents(ranked_panel(12), kDay, c); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("select: quantity is cap over price and ties break by symbol") {
    TokenPanel p;
    for (const char* s : {"EEE", "DDD", "CCC", "BBB", "AAA"}) p.rows[s] = {{kDay, 4.0, 1e9, 1.0}};
    const auto set = select_constituents(p, kDay, {});
    REQUIRE(set.members.size() == 5);
    CHECK(set.members[0].symbol == "AAA");
    CHECK(set.members[4].symbol == "EEE");
    CHECK(set.members[0].quantity == 2.5e8);
    CHECK(set.members[0].beta == 1.0);
}

TEST_CASE("select: exclusions, threshold and missing prices") {
    auto p = ranked_panel(7);
    IndexConfig c;
    c.excluded = {"T000", "T001"};
    auto set = select_constituents(p, kDay, c);
    CHECK(set.members.size() == 5);
    CHECK(set.members.front().symbol == "T002");

    p.rows["T006"][0].market_cap = 999'999.0;
    p.rows["T005"][0].price.reset();
    CHECK(code_of([&] { select_constituents(p, kDay, c); }) == ErrorCode::InsufficientEligible);
}

TEST_CASE("divisor: single member arithmetic") {
    const auto set = single_member(500'000.0);
    const Divisor d = compute_divisor(set, {{"AAA", 2.0}}, 1000.0);
    CHECK(d.value == 1000.0);
    CHECK(d.effective_date == kDay);
    CHECK(index_level(set, d, {{"AAA", 2.0}}, kDay) == 1000.0);
    CHECK(code_of([&] { compute_divisor(set, {{"AAA", 0.0}}, 1000.0); }) ==
          ErrorCode::ZeroCapitalization);
    CHECK(code_of([&] { compute_divisor(set, {}, 1000.0); }) == ErrorCode::MissingPrice);
}

TEST_CASE("index_level: self-consistency, homogeneity and missing prices") {
    ConstituentSet set{kDay, {{"AAA", 3.0, 1.0}, {"BBB", 7.0, 0.5}, {"CCC", 11.0, 1.0}}};
    const PriceMap prices{{"AAA", 13.0}, {"BBB", 17.0}, {"CCC", 19.0}};
    const Divisor d = compute_divisor(set, prices, 1234.5);
    CHECK(index_level(set, d, prices, kDay) == doctest::Approx(1234.5).epsilon(1e-15));

    const auto one = single_member(500'000.0);
    const Divisor d1 = compute_divisor(one, {{"AAA", 2.0}}, 1000.0);
    CHECK(index_level(one, d1, {{"AAA", 4.0}}, kDay) == 2000.0);

    CHECK(code_of([&] { index_level(set, d, {{"AAA", 1.0}}, kDay); }) == ErrorCode::MissingPrice);
}

TEST_CASE("index_level: equal caps moving +10% and -10% leave the level at the base") {
    ConstituentSet set{kDay, {{"AAA", 100.0, 1.0}, {"BBB", 50.0, 1.0}}};  // both caps 1000
    const Divisor d = compute_divisor(set, {{"AAA", 10.0}, {"BBB", 20.0}}, 1000.0);
    CHECK(index_level(set, d, {{"AAA", 11.0}, {"BBB", 18.0}}, kDay + std::chrono::days(1)) == 1000.0);
}

TEST_CASE("run_index: constant prices give a flat series at the base value") {
    const auto idx = run_index(synth::constant_panel(5, 90), {}, {});
    REQUIRE(idx.levels.size() == 90);
    for (double v : idx.levels.values) CHECK(v == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(idx.levels.values.front() == 1000.0);
    CHECK(idx.history.size() == 3);  // inception plus February and March
}

TEST_CASE("run_index: first level is exactly the base value on a random panel") {
    const auto idx = run_index(synth::turnover_panel(3, 17, 4, false), {}, {});
    CHECK(idx.levels.values.front() == kIndexBaseValue);
    CHECK(idx.history.front().reason == EpochReason::inception);
    for (const auto& e : idx.history) CHECK(e.constituents.members.size() % 5 == 0);
    CHECK(idx.history.front().constituents.members.size() == 15);
}

TEST_CASE("run_index: divisor continuity across full turnover") {
    const auto panel = synth::turnover_panel(5, 20, 6, true);
    IndexConfig c;
    c.target_count = 10;
    const auto idx = run_index(panel, {}, c);
    REQUIRE(idx.history.size() == 6);
    for (std::size_t e = 1; e < idx.history.size(); ++e) {
        const auto& prev = idx.history[e - 1];
        const auto& next = idx.history[e];
        const Date t = next.divisor.effective_date;
        const double pre = index_level(prev.constituents, prev.divisor,
                                       member_prices(panel, prev.constituents, t), t);
        const double post = index_level(next.constituents, next.divisor,
                                        member_prices(panel, next.constituents, t), t);
        CHECK(std::fabs(pre - post) <= 1e-9 * pre);
        std::set<std::string> before, after;
        for (const auto& m : prev.constituents.members) before.insert(m.symbol);
        for (const auto& m : next.constituents.members) after.insert(m.symbol);
        std::vector<std::string> common;
        std::set_intersection(before.begin(), before.end(), after.begin(), after.end(),
                              std::back_inserter(common));
        CHECK(common.empty());
    }
}

TEST_CASE("run_index: levels are invariant to rescaling every cap") {
    auto panel = synth::turnover_panel(9, 12, 3, false);
    auto scaled = panel;
    for (auto& [s, rows] : scaled.rows) {
        for (auto& o : rows) *o.market_cap *= 1000.0;
    }
    IndexConfig c;
    c.min_mcap = 1.0;
    const auto a = run_index(panel, {}, c);
    const auto b = run_index(scaled, {}, c);
    REQUIRE(a.levels.size() == b.levels.size());
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        CHECK(a.levels.values[i] == doctest::Approx(b.levels.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("run_index: a member losing its price forces a rebuild on the last valid day") {
    auto panel = synth::constant_panel(7, 20);
    const Date gap = make_date(2021, 1, 11);
    auto& rows = panel.rows.at("T006");  // the largest cap, always a member
    for (auto& o : rows) {
        if (o.date == gap) o.price.reset();
    }
    const auto idx = run_index(panel, {}, {});
    REQUIRE(idx.history.size() >= 2);
    const auto& forced = idx.history[1];
    CHECK(forced.reason == EpochReason::forced);
    CHECK(forced.divisor.effective_date == gap - std::chrono::days(1));
    for (const auto& m : forced.constituents.members) CHECK(m.symbol != "T006");
    CHECK(idx.levels.value_at(gap) == doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("run_index: excluded symbols never enter and the start waits for five names") {
    auto panel = synth::constant_panel(6, 10);
    panel.rows.at("T005").erase(panel.rows.at("T005").begin(), panel.rows.at("T005").begin() + 3);
    IndexConfig c;
    c.excluded = {"T000"};
    const auto idx = run_index(panel, {}, c);
    CHECK(idx.levels.dates.front() == make_date(2021, 1, 4));
    CHECK(idx.cumulative_members().count("T000") == 0);
}

TEST_CASE("run_index: CSV and JSON output") {
    const auto idx = run_index(synth::constant_panel(5, 3), {}, {});
    std::ostringstream csv;
    write_index_csv(idx, csv);
    CHECK(csv.str() == "date,level,epoch_id\n2021-01-01,1000,0\n2021-01-02,1000,0\n2021-01-03,1000,0\n");

    std::ostringstream json;
    write_epochs_json(idx, json);
    const auto doc = nlohmann::json::parse(json.str());
    REQUIRE(doc.size() == 1);
    CHECK(doc[0]["effective_date"] == "2021-01-01");
    CHECK(doc[0]["members"].size() == 5);
    CHECK(doc[0]["members"][0]["symbol"] == "T004");
}
