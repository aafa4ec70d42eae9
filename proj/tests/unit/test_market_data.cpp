#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "defix/config.hpp"
#include "defix/error.hpp"
#include "defix/market_data.hpp"
#include "synthetic.hpp"

using namespace defix;

namespace {

TokenPanel load_prices(const std::string& text) {
    std::istringstream in(text);
    return ingest_prices(in);
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

const char* kHeader = "date,symbol,close_usd,market_cap_usd,volume_usd\n";

}  // namespace

TEST_CASE("prices: well-formed rows load into one symbol") {
    const auto p = load_prices(std::string(kHeader) +
                               "2021-01-01,AAA,1.5,1000,10\n"
                               "2021-01-02,AAA,1.6,1100,11\n"
                               "2021-01-03,AAA,1.7,1200,\n");
    REQUIRE(p.symbols().size() == 1);
    const auto& rows = p.rows.at("AAA");
    REQUIRE(rows.size() == 3);
    CHECK(*rows[1].price == 1.6);
    CHECK_FALSE(rows[2].volume.has_value());
}

TEST_CASE("prices: rows are sorted by date per symbol whatever the file order") {
    const auto p = load_prices(std::string(kHeader) +
                               "2021-01-03,AAA,3,1,1\n"
                               "2021-01-01,BBB,1,1,1\n"
                               "2021-01-01,AAA,1,1,1\n");
    CHECK(p.rows.at("AAA").front().date == make_date(2021, 1, 1));
    CHECK(p.calendar().size() == 2);
}

TEST_CASE("prices: duplicate key names both rows") {
    try {
        load_prices(std::string(kHeader) + "2021-01-01,AAA,1,1,1\n2021-01-01,AAA,2,2,2\n");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateKey);
        REQUIRE(e.row().has_value());
        CHECK(*e.row() == 3);
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("prices: validation errors") {
    CHECK(code_of([] { load_prices(std::string(kHeader) + "2021-01-01,AAA,-5.0,1,1\n"); }) ==
          ErrorCode::NegativeValue);
    CHECK(code_of([] { load_prices(std::string(kHeader) + "2021-02-30,AAA,1,1,1\n"); }) ==
          ErrorCode::BadDate);
    CHECK(code_of([] { load_prices(std::string(kHeader) + "21-01-01,AAA,1,1,1\n"); }) ==
          ErrorCode::BadDate);
    CHECK(code_of([] { load_prices(std::string(kHeader) + "2021-01-01,AAA,abc,1,1\n"); }) ==
          ErrorCode::BadNumber);
    CHECK(code_of([] { load_prices(std::string(kHeader) + "2021-01-01,AAA,inf,1,1\n"); }) ==
          ErrorCode::BadNumber);
    CHECK(code_of([] { load_prices("date,symbol,close_usd,volume_usd\n"); }) ==
          ErrorCode::MissingColumn);
    CHECK(code_of([] { load_prices(std::string(kHeader) + "2021-01-01,AAA,1,1\n"); }) ==
          ErrorCode::SchemaMismatch);
    CHECK(code_of([] { load_prices(""); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("prices: bad number reports its row") {
    try {
        load_prices(std::string(kHeader) + "2021-01-01,AAA,1,1,1\n2021-01-02,AAA,1,x,1\n");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.row() == std::optional<std::size_t>(3));
    }
}

TEST_CASE("tvl: rows for unknown symbols are kept and reported") {
    auto p = load_prices(std::string(kHeader) + "2021-01-01,AAA,1,1,1\n");
    std::istringstream tvl("date,symbol,tvl_usd\n2021-01-01,AAA,5\n2021-01-01,ZZZ,7\n2021-01-02,ZZZ,8\n");
    const auto report = ingest_tvl(tvl, p);
    CHECK(p.tvl.at("ZZZ").size() == 2);
    CHECK(p.tvl.at("AAA").at(make_date(2021, 1, 1)) == 5.0);
    REQUIRE(report.rows_by_symbol.count("ZZZ"));
    CHECK(report.rows_by_symbol.at("ZZZ") == 2);
    CHECK(report.rows_by_symbol.count("AAA") == 0);
    CHECK(report.to_json_lines().find("\"symbol\":\"ZZZ\"") != std::string::npos);
}

TEST_CASE("network: counts attach and missing columns are rejected") {
    auto p = load_prices(std::string(kHeader) + "2021-01-01,AAA,1,1,1\n");
    std::istringstream net("date,symbol,address_count,transaction_count\n2021-01-01,AAA,10,\n");
    ingest_network(net, p);
    const auto& c = p.network.at("AAA").at(make_date(2021, 1, 1));
    CHECK(c.address_count == std::optional<double>(10.0));
    CHECK_FALSE(c.transaction_count.has_value());

    std::istringstream bad("date,symbol,address_count\n2021-01-01,AAA,1\n");
    CHECK(code_of([&] { ingest_network(bad, p); }) == ErrorCode::MissingColumn);
}

TEST_CASE("attention: bounds and weekly spacing") {
    std::istringstream ok("week_start,term,interest\n2021-01-03,DeFi,100\n2021-01-10,DeFi,0\n");
    const auto series = ingest_attention(ok);
    REQUIRE(series.size() == 1);
    CHECK(series[0].interest.values[0] == 100.0);

    std::istringstream high("week_start,term,interest\n2021-01-03,DeFi,101\n");
    CHECK(code_of([&] { ingest_attention(high); }) == ErrorCode::InterestOutOfRange);
    std::istringstream low("week_start,term,interest\n2021-01-03,DeFi,-1\n");
    CHECK(code_of([&] { ingest_attention(low); }) == ErrorCode::InterestOutOfRange);
    std::istringstream frac("week_start,term,interest\n2021-01-03,DeFi,4.5\n");
    CHECK(code_of([&] { ingest_attention(frac); }) == ErrorCode::BadNumber);
    std::istringstream gap("week_start,term,interest\n2021-01-03,DeFi,4\n2021-01-17,DeFi,5\n");
    CHECK(code_of([&] { ingest_attention(gap); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("clean_panel: drop policy") {
    TokenPanel p;
    auto& rows = p.rows["AAA"];
    for (int d = 0; d < 10; ++d) {
        Observation o{make_date(2021, 1, 1) + std::chrono::days(d), 1.0 + d, 100.0, 1.0};
        if (d == 3 || d == 7) o.price.reset();
        rows.push_back(o);
    }
    p.rows["BBB"].push_back({make_date(2021, 1, 1), std::nullopt, 1.0, 1.0});

    const auto result = clean_panel(p);
    CHECK(result.panel.rows.at("AAA").size() == 8);
    CHECK(result.panel.rows.count("BBB") == 0);
    REQUIRE(result.report.entries.size() == 2);
    CHECK(result.report.entries[0].rows_dropped == 2);
    CHECK(result.report.entries[1].symbol_dropped);

    SUBCASE("idempotent") {
        const auto again = clean_panel(result.panel);
        CHECK(again.panel == result.panel);
    }
}

TEST_CASE("clean_panel: a panel without gaps comes back identical") {
    const auto p = synth::constant_panel(3, 20);
    CHECK(clean_panel(p).panel == p);
}

TEST_CASE("clean_panel: forward fill carries the last price") {
    TokenPanel p;
    p.rows["AAA"] = {{make_date(2021, 1, 1), 2.0, 10.0, 1.0},
                     {make_date(2021, 1, 2), std::nullopt, std::nullopt, 1.0},
                     {make_date(2021, 1, 3), 3.0, 12.0, 1.0}};
    const auto r = clean_panel(p, MissingPolicy::forward_fill);
    const auto& rows = r.panel.rows.at("AAA");
    REQUIRE(rows.size() == 3);
    CHECK(*rows[1].price == 2.0);
    CHECK(*rows[1].market_cap == 10.0);
    CHECK(r.report.entries[0].rows_filled == 1);
}

TEST_CASE("filter_min_mcap: inclusive threshold") {
    TokenPanel p;
    const Date d = make_date(2021, 6, 1);
    p.rows["LOW"] = {{d, 1.0, 999'999.0, 1.0}};
    p.rows["EDGE"] = {{d, 1.0, 1'000'000.0, 1.0}};
    p.rows["BIG"] = {{d, 1.0, 5e9, 1.0}};
    const auto kept = filter_min_mcap(p, d);
    CHECK(kept.rows.count("LOW") == 0);
    CHECK(kept.rows.count("EDGE") == 1);
    CHECK(kept.rows.count("BIG") == 1);
    CHECK(code_of([&] { filter_min_mcap(p, d, 0.0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("config: zero market-cap threshold is rejected at parse") {
    CHECK(code_of([] { parse_config("[inputs]\nprices = p.csv\n[index]\nmin_mcap = 0\n", "."); }) ==
          ErrorCode::InvalidConfig);
}

TEST_CASE("resample: compounding and labels") {
    Series daily;
    const Date sunday = make_date(2024, 1, 7);
    for (int d = 0; d < 7; ++d) daily.push_back(sunday + std::chrono::days(d), 0.01);
    const auto w = resample(daily, Frequency::weekly, Aggregation::compound);
    REQUIRE(w.size() == 1);
    CHECK(w.dates[0] == sunday);
    CHECK(w.values[0] == doctest::Approx(std::pow(1.01, 7) - 1.0).epsilon(1e-14));
    CHECK(w.values[0] == doctest::Approx(0.072135).epsilon(1e-6));

    Series zeros;
    for (int d = 0; d < 3; ++d) zeros.push_back(sunday + std::chrono::days(d), 0.0);
    CHECK(resample(zeros, Frequency::weekly, Aggregation::compound).values[0] == 0.0);

    Series single;
    single.push_back(make_date(2024, 1, 10), 0.05);
    const auto s = resample(single, Frequency::weekly, Aggregation::compound);
    CHECK(s.dates[0] == sunday);
    CHECK(s.values[0] == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("resample: empty buckets are missing, not fabricated") {
    Series daily;
    daily.push_back(make_date(2024, 1, 8), 0.01);
    daily.push_back(make_date(2024, 1, 23), 0.02);
    const auto w = resample(daily, Frequency::weekly, Aggregation::compound);
    REQUIRE(w.size() == 3);
    CHECK(is_missing(w.values[1]));
    const auto m = resample(daily, Frequency::monthly, Aggregation::last);
    REQUIRE(m.size() == 1);
    CHECK(m.dates[0] == make_date(2024, 1, 1));
    CHECK(m.values[0] == 0.02);
}

TEST_CASE("resample: constant levels stay constant") {
    Series levels;
    for (int d = 0; d < 120; ++d) levels.push_back(make_date(2021, 1, 1) + std::chrono::days(d), 42.0);
    for (Frequency f : {Frequency::weekly, Frequency::monthly}) {
        for (double v : resample(levels, f, Aggregation::last).values) CHECK(v == 42.0);
    }
}

TEST_CASE("resample: weekly compounding matches daily compounding over the span") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z(0.0, 0.02);
    Series daily;
    const Date start = make_date(2021, 1, 3);  // a Sunday
    for (int d = 0; d < 7 * 30; ++d) daily.push_back(start + std::chrono::days(d), z(rng));
    double prod_daily = 1.0;
    for (double r : daily.values) prod_daily *= 1.0 + r;
    double prod_weekly = 1.0;
    for (double r : resample(daily, Frequency::weekly, Aggregation::compound).values) prod_weekly *= 1.0 + r;
    CHECK(std::fabs(prod_weekly / prod_daily - 1.0) <= 1e-12);
}

TEST_CASE("week buckets start on Sunday") {
    CHECK(week_start(make_date(2024, 1, 7)) == make_date(2024, 1, 7));
    CHECK(week_start(make_date(2024, 1, 13)) == make_date(2024, 1, 7));
    CHECK(week_start(make_date(2024, 1, 14)) == make_date(2024, 1, 14));
    CHECK(shift_bucket(make_date(2024, 1, 1), Frequency::monthly, -1) == make_date(2023, 12, 1));
}

TEST_CASE("round trip: write then ingest gives an equal panel") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TokenPanel p;
    for (const char* s : {"AAA", "BBB"}) {
        for (int d = 0; d < 30; ++d) {
            const Date date = make_date(2021, 3, 1) + std::chrono::days(d);
            Observation o{date, u(rng) * 1e3, u(rng) * 1e9, u(rng) * 1e7};
            if (d == 5) o.volume.reset();
            p.rows[s].push_back(o);
            p.tvl[s][date] = u(rng) * 1e8;
            p.network[s][date] = {std::round(u(rng) * 1e4), d == 9 ? std::nullopt
                                                                   : std::optional<double>(3.0)};
        }
    }
    std::stringstream prices, tvl, net;
    write_prices_csv(p, prices);
    write_tvl_csv(p, tvl);
    write_network_csv(p, net);
    TokenPanel back = ingest_prices(prices);
    ingest_tvl(tvl, back);
    ingest_network(net, back);
    CHECK(back == p);

    std::vector<AttentionSeries> att{{"DeFi", {}}};
    for (int w = 0; w < 5; ++w) att[0].interest.push_back(make_date(2021, 1, 3) + std::chrono::days(7 * w), 10.0 * w);
    std::stringstream a;
    write_attention_csv(att, a);
    const auto att_back = ingest_attention(a);
    REQUIRE(att_back.size() == 1);
    CHECK(same_values(att_back[0].interest, att[0].interest));
}
