#include "defix/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "csv.hpp"
#include "defix/error.hpp"
#include "defix/market_data.hpp"

namespace defix {

ReturnSeries simple_returns(const Series& levels, Frequency frequency) {
    if (levels.size() < 2) {
        throw Error(ErrorCode::TooFewObservations, "need at least two levels for a return");
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double p = levels.values[i];
        if (!is_missing(p) && !(p > 0.0 && std::isfinite(p))) {
            throw Error(ErrorCode::NonPositiveLevel,
                        "level " + csv::format_exact(p) + " on " + format_date(levels.dates[i]));
        }
    }
    ReturnSeries out{frequency, {}};
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const double prev = levels.values[i - 1];
        const double cur = levels.values[i];
        const double r = (is_missing(prev) || is_missing(cur)) ? kMissing : cur / prev - 1.0;
        out.rows.push_back(levels.dates[i], r);
    }
    return out;
}

Series cumulative_returns(const ReturnSeries& returns) {
    Series out;
    double growth = 1.0;
    for (std::size_t i = 0; i < returns.rows.size(); ++i) {
        const double r = returns.rows.values[i];
        if (!is_missing(r)) growth *= 1.0 + r;
        out.push_back(returns.rows.dates[i], growth - 1.0);
    }
    return out;
}

ReturnSeries aggregate_returns(const ReturnSeries& daily, Frequency to) {
    if (daily.frequency != Frequency::daily) {
        throw Error(ErrorCode::InvalidConfig, "aggregate_returns expects a daily series");
    }
    return ReturnSeries{to, resample(daily.rows, to, Aggregation::compound)};
}

namespace {

std::vector<double> drop_missing(std::span<const double> values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (!is_missing(v)) out.push_back(v);
    }
    return out;
}

double mean_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

bool constant(const std::vector<double>& x) {
    return std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end();
}

double dw_of(const std::vector<double>& x, double mean) {
    if (constant(x)) throw Error(ErrorCode::ZeroVariance, "constant series");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mean;
        den += d * d;
        if (i > 0) {
            const double step = x[i] - x[i - 1];
            num += step * step;
        }
    }
    if (den == 0.0) throw Error(ErrorCode::ZeroVariance, "constant series");
    return num / den;
}

}  // namespace

double durbin_watson(std::span<const double> values) {
    const auto x = drop_missing(values);
    if (x.size() < 2) {
        throw Error(ErrorCode::TooFewObservations, "Durbin-Watson needs at least two values");
    }
    return dw_of(x, mean_of(x));
}

SummaryRow summary_stats(std::span<const double> values, bool with_sharpe) {
    const auto x = drop_missing(values);
    if (x.size() < 4) {
        throw Error(ErrorCode::TooFewObservations,
                    "summary statistics need at least 4 values, got " + std::to_string(x.size()));
    }
    SummaryRow row;
    row.n = x.size();
    const double n = static_cast<double>(x.size());
    row.mean = mean_of(x);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    row.min = *lo;
    row.max = *hi;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - row.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if (m2 == 0.0 || constant(x)) {
        throw Error(ErrorCode::ZeroVariance, "constant series has no dispersion");
    }
    row.sd = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    row.skewness = m3 / std::pow(m2, 1.5);
    row.kurtosis_excess = m4 / (m2 * m2) - 3.0;
    row.durbin_watson = dw_of(x, row.mean);
    if (with_sharpe) row.sharpe = row.mean / row.sd;
    return row;
}

SummaryRow to_percent(const SummaryRow& row) {
    SummaryRow out = row;
    out.mean *= 100.0;
    out.sd *= 100.0;
    out.max *= 100.0;
    out.min *= 100.0;
    return out;
}

std::string render3(double v) { return csv::format_fixed(v, 3); }

}  // namespace defix
