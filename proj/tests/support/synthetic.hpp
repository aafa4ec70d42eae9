#pragma once

// Synthetic panels shared by the tests, the acceptance suite and the
// benchmarks. Everything is driven by an explicit seed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "defix/date.hpp"
#include "defix/econometrics.hpp"
#include "defix/market_data.hpp"

namespace synth {

inline std::string token_name(std::size_t i) {
    std::string s = "T";
    if (i < 100) s += '0';
    if (i < 10) s += '0';
    return s + std::to_string(i);
}

/// `n` tokens with the same constant price and cap on every day.
inline defix::TokenPanel constant_panel(std::size_t n, int days, double price = 10.0,
                                        double cap = 5.0e7,
                                        defix::Date first = defix::make_date(2021, 1, 1)) {
    defix::TokenPanel p;
    for (std::size_t i = 0; i < n; ++i) {
        auto& rows = p.rows[token_name(i)];
        for (int d = 0; d < days; ++d) {
            rows.push_back({first + std::chrono::days(d), price, cap * (1.0 + 0.01 * i), 1.0e6});
        }
    }
    return p;
}

/// Random-walk prices; caps are driven by `rank_boost` so that membership can
/// be forced to turn over completely. With `alternate` set, tokens are split
/// into two halves and each month the other half carries the large caps.
inline defix::TokenPanel turnover_panel(std::uint64_t seed, std::size_t n, int months,
                                        bool alternate,
                                        defix::Date first = defix::make_date(2020, 1, 1)) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    defix::TokenPanel p;
    std::vector<double> log_price(n);
    for (auto& lp : log_price) lp = std::log(1.0 + 100.0 * u(rng));
    const auto ymd = std::chrono::year_month_day{first};
    const defix::Date end = std::chrono::sys_days{ymd + std::chrono::months(months)};
    for (defix::Date d = first; d < end; d += std::chrono::days(1)) {
        const auto month = static_cast<unsigned>(std::chrono::year_month_day{d}.month());
        for (std::size_t i = 0; i < n; ++i) {
            log_price[i] += 0.03 * z(rng);
            const bool favoured = !alternate || ((i < n / 2) == (month % 2 == 1));
            const double cap = (favoured ? 1.0e9 : 2.0e7) * (1.0 + u(rng));
            p.rows[token_name(i)].push_back({d, std::exp(log_price[i]), cap, cap * 0.05});
        }
    }
    return p;
}

/// Unbalanced panel with y = b . x + tau_t + noise. Entities E0 and E1 are
/// observed in every period; the others appear with probability `presence`.
inline defix::PanelData random_panel(std::mt19937_64& rng, std::size_t entities, std::size_t periods,
                                     std::size_t k, const std::vector<double>& b, double presence) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> tau(periods);
    for (auto& t : tau) t = 2.0 * z(rng);
    defix::PanelData panel;
    for (std::size_t j = 0; j < k; ++j) {
        panel.regressor_names.push_back(defix::lag_label("x", static_cast<int>(j + 1)));
    }
    for (std::size_t e = 0; e < entities; ++e) {
        for (std::size_t t = 0; t < periods; ++t) {
            if (e > 1 && u(rng) > presence) continue;
            defix::PanelObservation obs{"E" + std::to_string(e),
                                        defix::make_date(2021, 1, 3) +
                                            std::chrono::days(7 * static_cast<int>(t)),
                                        0.0,
                                        {}};
            double y = tau[t] + z(rng);
            for (std::size_t j = 0; j < k; ++j) {
                obs.x.push_back(z(rng));
                y += b[j] * obs.x.back();
            }
            obs.y = y;
            panel.rows.push_back(std::move(obs));
        }
    }
    return panel;
}

/// Writes the panel (and optional extensions) as CSV inputs plus an INI
/// config; returns the config path.
inline std::filesystem::path write_inputs(const std::filesystem::path& dir,
                                          const defix::TokenPanel& panel,
                                          const std::vector<defix::AttentionSeries>& attention = {},
                                          const std::string& extra_ini = "") {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "prices.csv", std::ios::binary);
        defix::write_prices_csv(panel, out);
    }
    std::string ini = "[inputs]\nprices = prices.csv\n";
    if (!panel.tvl.empty()) {
        std::ofstream out(dir / "tvl.csv", std::ios::binary);
        defix::write_tvl_csv(panel, out);
        ini += "tvl = tvl.csv\n";
    }
    if (!panel.network.empty()) {
        std::ofstream out(dir / "network.csv", std::ios::binary);
        defix::write_network_csv(panel, out);
        ini += "network = network.csv\n";
    }
    if (!attention.empty()) {
        std::ofstream out(dir / "attention.csv", std::ios::binary);
        defix::write_attention_csv(attention, out);
        ini += "attention = attention.csv\n";
    }
    ini += extra_ini;
    std::ofstream(dir / "run.ini", std::ios::binary) << ini;
    return dir / "run.ini";
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("defix_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace synth
