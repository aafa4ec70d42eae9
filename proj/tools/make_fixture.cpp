// Writes a deterministic synthetic input set (prices, tvl, network,
// attention) plus a matching fixture.ini. The same seed always produces the
// same bytes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "defix/date.hpp"

namespace {

using defix::Date;

struct Token {
    std::string symbol;
    double start_cap;      // USD
    double beta;           // loading on the BTC shock
    double lag_loading;    // loading on yesterday's BTC shock
    double vol;            // idiosyncratic daily sd
    int listed_from = 0;   // first day index with data
    bool network = false;
    bool tvl = true;
};

std::string fmt(double v, int sig = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", sig, v);
    return buf;
}

std::string money(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate a deterministic synthetic input fixture"};
    std::string out_dir;
    std::uint64_t seed = 20220101;
    std::string start = "2020-01-01";
    int days = 731;
    app.add_option("out", out_dir, "Output directory")->required();
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--start", start, "First calendar day");
    app.add_option("--days", days, "Number of calendar days")->check(CLI::Range(60, 5000));
    CLI11_PARSE(app, argc, argv);

    const Date first = defix::parse_date(start);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::vector<Token> tokens{
        {"LUNA", 4.0e9, 1.3, 0.25, 0.055, 0, true},   {"AVAX", 3.5e9, 1.2, 0.20, 0.050, 0, true},
        {"WBTC", 6.0e9, 1.0, 0.00, 0.004, 0, true},   {"DAI", 5.0e9, 0.0, 0.00, 0.001, 0, true},
        {"LINK", 3.0e9, 1.1, 0.30, 0.045, 0, true},   {"UNI", 2.8e9, 1.1, 0.10, 0.045, 200, true},
        {"FTM", 1.5e9, 1.4, 0.25, 0.060, 0, true},    {"XTZ", 1.2e9, 0.9, 0.20, 0.040, 0, false},
        {"AAVE", 2.0e9, 1.2, 0.10, 0.050, 250, true}, {"GRT", 1.1e9, 1.1, 0.10, 0.050, 330, false},
        {"CAKE", 1.4e9, 1.0, 0.15, 0.050, 240, true}, {"MKR", 1.6e9, 1.0, 0.30, 0.040, 0, true},
        {"RUNE", 0.9e9, 1.3, 0.20, 0.060, 0, false},  {"CRV", 0.8e9, 1.2, 0.10, 0.055, 200, false},
        {"LRC", 0.6e9, 1.1, 0.25, 0.055, 0, false},   {"SUSHI", 5.0e8, 1.3, 0.10, 0.060, 240, true},
        {"COMP", 7.0e8, 1.1, 0.10, 0.050, 160, true}, {"YFI", 4.0e8, 1.2, 0.05, 0.060, 190, true},
        {"SNX", 3.0e8, 1.2, 0.15, 0.060, 0, false},   {"BAL", 1.5e8, 1.1, 0.05, 0.060, 170, false},
        {"REN", 8.0e7, 1.2, 0.10, 0.065, 0, false},   {"BNT", 4.0e7, 1.0, 0.05, 0.060, 0, false},
        {"KNC", 3.0e7, 1.0, 0.05, 0.065, 0, false},   {"ZRX", 1.2e6, 1.0, 0.05, 0.070, 0, false},
    };
    const std::size_t n_days = static_cast<std::size_t>(days);

    // Benchmarks: BTC and ETH price paths and the CRIX level.
    std::vector<double> btc_shock(n_days), btc(n_days), eth(n_days), crix(n_days);
    double lb = std::log(7200.0), le = std::log(130.0), lc = std::log(1000.0);
    for (std::size_t d = 0; d < n_days; ++d) {
        const double s = 0.035 * z(rng);
        btc_shock[d] = s;
        if (d > 0) {
            lb += 0.0015 + s;
            le += 0.0020 + 1.1 * s + 0.030 * z(rng);
            lc += 0.0012 + 0.8 * s + 0.012 * z(rng);
        }
        btc[d] = std::exp(lb);
        eth[d] = std::exp(le);
        crix[d] = std::exp(lc);
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    std::ofstream prices(dir / "prices.csv", std::ios::binary);
    std::ofstream tvl(dir / "tvl.csv", std::ios::binary);
    std::ofstream network(dir / "network.csv", std::ios::binary);
    std::ofstream attention(dir / "attention.csv", std::ios::binary);
    prices << "date,symbol,close_usd,market_cap_usd,volume_usd\n";
    tvl << "date,symbol,tvl_usd\n";
    network << "date,symbol,address_count,transaction_count\n";
    attention << "week_start,term,interest\n";

    // Rows are written date-major so the files look like provider dumps.
    struct State {
        double log_price;
        double supply;
        double log_ratio;  // log(tvl / cap)
        double log_addr;
        double log_tx;
        double addr_level;  // long-run log address count
    };
    std::vector<State> state;
    for (const auto& t : tokens) {
        const double price0 = 1.0 + 50.0 * u(rng);
        state.push_back({std::log(price0), t.start_cap / price0, std::log(0.3 + 1.5 * u(rng)),
                         std::log(400.0 + 1500.0 * u(rng)), std::log(2000.0 + 4000.0 * u(rng)), 0.0});
        state.back().addr_level = state.back().log_addr;
    }

    for (std::size_t d = 0; d < n_days; ++d) {
        const Date date = first + std::chrono::days(static_cast<int>(d));
        const std::string ds = defix::format_date(date);
        const double lag = d > 0 ? btc_shock[d - 1] : 0.0;

        prices << ds << ",BTC," << fmt(btc[d]) << ',' << money(btc[d] * 1.87e7) << ','
               << money(btc[d] * 1.87e7 * 0.04) << '\n';
        prices << ds << ",ETH," << fmt(eth[d]) << ',' << money(eth[d] * 1.15e8) << ','
               << money(eth[d] * 1.15e8 * 0.06) << '\n';
        prices << ds << ",CRIX," << fmt(crix[d]) << ",,\n";

        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const auto& t = tokens[i];
            auto& s = state[i];
            if (static_cast<int>(d) < t.listed_from) continue;
            if (static_cast<int>(d) > t.listed_from) {
                const double drift = t.symbol == "DAI" ? 0.0 : 0.0008;
                s.log_price += drift + t.beta * btc_shock[d] + t.lag_loading * lag + t.vol * z(rng);
                if (t.symbol == "DAI") s.log_price = 0.98 * s.log_price;
                s.log_ratio = 0.97 * s.log_ratio + 0.03 * std::log(0.8) + 0.05 * z(rng) -
                              0.3 * (t.beta * btc_shock[d]);
                const double trend = s.addr_level + 0.002 * static_cast<double>(d);
                s.log_addr = 0.97 * s.log_addr + 0.03 * trend + 0.12 * z(rng);
                s.log_tx = 0.95 * s.log_tx + 0.05 * (s.log_addr + std::log(4.0)) + 0.10 * z(rng);
            }
            const double price = std::exp(s.log_price);
            const double cap = price * s.supply;
            // A few missing closes to exercise cleaning and forced reconstitution.
            const bool gap = (t.symbol == "SNX" && d % 173 == 91) || (t.symbol == "REN" && d == 400);
            prices << ds << ',' << t.symbol << ',' << (gap ? std::string() : fmt(price)) << ','
                   << money(cap) << ',' << money(cap * (0.02 + 0.08 * u(rng))) << '\n';
            if (t.tvl) tvl << ds << ',' << t.symbol << ',' << money(cap * std::exp(s.log_ratio)) << '\n';
            if (t.network) {
                const bool outage = d % 97 == 13 && i % 3 == 0;
                const double addr = outage ? 0.0 : std::round(std::exp(s.log_addr));
                network << ds << ',' << t.symbol << ',' << fmt(addr) << ','
                        << fmt(std::round(std::exp(s.log_tx))) << '\n';
            }
        }
        // TVL reported for a protocol without a listed token.
        tvl << ds << ",GHOST," << money(2.5e7 * (1.0 + 0.1 * std::sin(static_cast<double>(d) / 30.0)))
            << '\n';
    }

    // Weekly search interest, Sunday anchored, rescaled so each term peaks at 100.
    const Date first_week = defix::week_start(first);
    const Date last_day = first + std::chrono::days(days - 1);
    for (const auto& [term, base, growth] :
         {std::tuple<std::string, double, double>{"Decentralized finance", 5.0, 0.018},
          std::tuple<std::string, double, double>{"DeFi", 20.0, 0.010}}) {
        std::vector<double> raw;
        for (Date w = first_week; w <= last_day; w += std::chrono::days(7)) {
            const double k = static_cast<double>(raw.size());
            raw.push_back(base * std::exp(growth * k) * (1.0 + 0.25 * z(rng)) +
                          8.0 * std::exp(-std::pow((k - 60.0) / 6.0, 2.0)));
        }
        const double peak = *std::max_element(raw.begin(), raw.end());
        Date w = first_week;
        for (double r : raw) {
            const double v = std::clamp(std::round(100.0 * std::max(r, 0.0) / peak), 0.0, 100.0);
            attention << defix::format_date(w) << ',' << term << ',' << fmt(v) << '\n';
            w += std::chrono::days(7);
        }
    }

    std::ofstream ini(dir / "fixture.ini", std::ios::binary);
    ini << "; Synthetic fixture produced by defix_make_fixture --seed " << seed << "\n"
        << "[inputs]\nprices = prices.csv\ntvl = tvl.csv\nnetwork = network.csv\n"
        << "attention = attention.csv\n\n"
        << "[index]\nmin_mcap = 1000000\nreconstitution = monthly\n\n"
        << "[analysis]\nfrequency = weekly\n\n"
        << "[output]\ndir = out\n";

    std::cout << "fixture written to " << dir.string() << '\n';
    return 0;
}
