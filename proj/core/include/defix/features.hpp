#pragma once

#include <cstddef>
#include <vector>

#include "defix/date.hpp"
#include "defix/econometrics.hpp"
#include "defix/series.hpp"

namespace defix {

struct GrowthResult {
    Series growth;                   // dated at the later endpoint
    std::size_t non_positive = 0;    // outputs missing because an endpoint was <= 0
    std::size_t gaps = 0;            // outputs missing because of a date gap or missing input
};

/// d_t = ln(x_t) - ln(x_{t-1}) between consecutive observations that are
/// exactly one `frequency` step apart. Anything else is emitted as missing
/// and counted; never +-inf.
GrowthResult log_growth(const Series& levels, Frequency frequency = Frequency::daily);

struct RatioResult {
    Series ratio;                // on the dates common to both inputs
    std::size_t missing = 0;     // common dates where the ratio is undefined
};

/// tvl_t / mcap_t. Missing when either input is missing or non-positive.
RatioResult valuation_ratio(const Series& tvl, const Series& mcap);

struct LogLogPoint {
    double ln_tvl;
    double ln_mcap;
};

struct LogLogFit {
    RegressionResult regression;  // ln(mcap) on [const, ln(tvl)]
    std::vector<LogLogPoint> points;
};

/// Pairs are aligned by position; only strictly positive pairs are used.
/// Throws Error{TooFewObservations} with fewer than three such pairs.
LogLogFit loglog_fit(const std::vector<double>& tvl, const std::vector<double>& mcap);

}  // namespace defix
