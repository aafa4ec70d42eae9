#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "defix/error.hpp"
#include "defix/features.hpp"
#include "oracles.hpp"

using namespace defix;

namespace {

Series daily(const std::vector<double>& values, Date first = make_date(2021, 1, 1)) {
    Series s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.push_back(first + std::chrono::days(static_cast<int>(i)), values[i]);
    }
    return s;
}

}  // namespace

TEST_CASE("log_growth: examples") {
    CHECK(log_growth(daily({100, 100})).growth.values == std::vector<double>{0.0});
    const auto doubled = log_growth(daily({100, 200}));
    CHECK(doubled.growth.values[0] == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(doubled.growth.dates[0] == make_date(2021, 1, 2));

    const auto zero = log_growth(daily({100, 0, 50}));
    REQUIRE(zero.growth.size() == 2);
    CHECK(is_missing(zero.growth.values[0]));
    CHECK(is_missing(zero.growth.values[1]));
    CHECK(zero.non_positive == 2);
    for (double v : zero.growth.values) CHECK_FALSE(std::isinf(v));
}

TEST_CASE("log_growth: date gaps and missing inputs are reported, not bridged") {
    Series s;
    s.push_back(make_date(2021, 1, 1), 10.0);
    s.push_back(make_date(2021, 1, 2), 20.0);
    s.push_back(make_date(2021, 1, 5), 40.0);
    s.push_back(make_date(2021, 1, 6), kMissing);
    const auto g = log_growth(s);
    CHECK_FALSE(is_missing(g.growth.values[0]));
    CHECK(is_missing(g.growth.values[1]));
    CHECK(is_missing(g.growth.values[2]));
    CHECK(g.gaps == 2);

    Series weekly;
    weekly.push_back(make_date(2021, 1, 3), 1.0);
    weekly.push_back(make_date(2021, 1, 10), std::exp(0.5));
    CHECK(log_growth(weekly, Frequency::weekly).growth.values[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("log_growth: telescoping and scale invariance") {
    std::mt19937_64 rng(12);
    std::lognormal_distribution<double> level(5.0, 2.0);
    std::uniform_int_distribution<int> len(2, 200);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(len(rng)));
        for (auto& x : v) x = level(rng);
        const auto g = log_growth(daily(v));
        double sum = 0.0;
        for (double d : g.growth.values) sum += d;
        CHECK(std::fabs(sum - std::log(v.back() / v.front())) <= 1e-12);

        std::vector<double> scaled;
        for (double x : v) scaled.push_back(x * 37.5);
        const auto gs = log_growth(daily(scaled));
        for (std::size_t i = 0; i < g.growth.size(); ++i) {
            CHECK(std::fabs(gs.growth.values[i] - g.growth.values[i]) <= 1e-12);
        }
    }
}

TEST_CASE("valuation_ratio: examples and scale invariance") {
    Series tvl = daily({2e6, 3e6, kMissing, 5e6});
    Series mcap = daily({4e6, 0.0, 1e6, 2e6});
    const auto r = valuation_ratio(tvl, mcap);
    REQUIRE(r.ratio.size() == 4);
    CHECK(r.ratio.values[0] == 0.5);
    CHECK(is_missing(r.ratio.values[1]));
    CHECK(is_missing(r.ratio.values[2]));
    CHECK(r.ratio.values[3] == 2.5);
    CHECK(r.missing == 2);

    Series tvl2 = daily({2e6, 3e6, kMissing, 5e6});
    Series mcap2 = daily({4e6, 0.0, 1e6, 2e6});
    for (auto& v : tvl2.values) v *= 8.0;
    for (auto& v : mcap2.values) v *= 8.0;
    CHECK(same_values(valuation_ratio(tvl2, mcap2).ratio, r.ratio));

    Series shorter = daily({1e6}, make_date(2021, 1, 4));
    const auto common = valuation_ratio(shorter, mcap);
    REQUIRE(common.ratio.size() == 1);
    CHECK(common.ratio.values[0] == 0.5);
}

TEST_CASE("loglog_fit: power laws recover their exponent") {
    std::vector<double> tvl, prop, square;
    for (int i = 1; i <= 20; ++i) {
        const double x = 1e6 * i;
        tvl.push_back(x);
        prop.push_back(3.5 * x);
        square.push_back(x * x);
    }
    const auto p = loglog_fit(tvl, prop);
    CHECK(p.regression.coef[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p.regression.coef[0] == doctest::Approx(std::log(3.5)).epsilon(1e-9));
    CHECK(p.regression.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(loglog_fit(tvl, square).regression.coef[1] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(p.points.size() == 20);
}

TEST_CASE("loglog_fit: matches the oracle and only the intercept moves under rescaling") {
    std::mt19937_64 rng(21);
    std::lognormal_distribution<double> l(15.0, 1.5);
    std::normal_distribution<double> z(0.0, 0.4);
    std::vector<double> tvl, mcap;
    for (int i = 0; i < 60; ++i) {
        tvl.push_back(l(rng));
        mcap.push_back(std::exp(2.0 + 0.85 * std::log(tvl.back()) + z(rng)));
    }
    tvl.push_back(-1.0);
    mcap.push_back(5.0);
    tvl.push_back(kMissing);
    mcap.push_back(5.0);
    const auto fit = loglog_fit(tvl, mcap);
    CHECK(fit.points.size() == 60);

    std::vector<double> lx, ly;
    for (const auto& pt : fit.points) {
        lx.push_back(pt.ln_tvl);
        ly.push_back(pt.ln_mcap);
    }
    const auto ref = oracle::normal_equations(ly, {lx}, true);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(oracle::close_rel(fit.regression.coef[j], ref.coef[j], 1e-9));
        CHECK(oracle::close_rel(fit.regression.se[j], ref.se[j], 1e-9));
    }

    std::vector<double> scaled;
    for (double v : tvl) scaled.push_back(v * 1000.0);
    const auto moved = loglog_fit(scaled, mcap);
    CHECK(moved.regression.coef[1] == doctest::Approx(fit.regression.coef[1]).epsilon(1e-10));
    CHECK(moved.regression.coef[0] != doctest::Approx(fit.regression.coef[0]));
}

TEST_CASE("loglog_fit: needs three positive pairs") {
    try {
        loglog_fit({1.0, 2.0, 0.0}, {1.0, 2.0, 3.0});
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewObservations);
    }
}
