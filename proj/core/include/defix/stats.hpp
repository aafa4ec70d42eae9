#pragma once

#include <optional>
#include <span>
#include <string>

#include "defix/date.hpp"
#include "defix/series.hpp"

namespace defix {

/// Simple returns as fractions. Missing entries are allowed and propagate.
struct ReturnSeries {
    Frequency frequency = Frequency::daily;
    Series rows;
};

/// r_t = P_t / P_{t-1} - 1 over consecutive observations, dated at t.
/// A missing level yields missing returns on both sides of it.
/// Throws Error{NonPositiveLevel} for a level <= 0 and
/// Error{TooFewObservations} for fewer than two levels.
ReturnSeries simple_returns(const Series& levels, Frequency frequency = Frequency::daily);

/// c_t = prod_{s<=t} (1 + r_s) - 1; missing returns contribute nothing.
Series cumulative_returns(const ReturnSeries& returns);

/// Compounds a daily ReturnSeries into weekly or monthly buckets.
ReturnSeries aggregate_returns(const ReturnSeries& daily, Frequency to);

struct SummaryRow {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample, n - 1
    double max = 0.0;
    double min = 0.0;
    double skewness = 0.0;         // m3 / m2^(3/2)
    double kurtosis_excess = 0.0;  // m4 / m2^2 - 3
    double durbin_watson = 0.0;
    std::optional<double> sharpe;  // mean / sd, zero risk-free rate
};

/// Missing values are dropped first. Needs n >= 4 and a non-zero variance.
/// Throws Error{TooFewObservations} / Error{ZeroVariance}.
SummaryRow summary_stats(std::span<const double> values, bool with_sharpe);

/// sum_{t>=2} (x_t - x_{t-1})^2 / sum_t (x_t - mean)^2 on the series itself.
/// Throws Error{TooFewObservations} (n < 2) / Error{ZeroVariance}.
double durbin_watson(std::span<const double> values);

/// Percent rendering of a row computed on fractions: mean, sd, max and min
/// scale by 100; the dimensionless entries (sharpe included) are untouched.
SummaryRow to_percent(const SummaryRow& row);

/// Fixed three-decimal rendering used by every summary table.
std::string render3(double v);

}  // namespace defix
