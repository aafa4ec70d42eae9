#include "defix/features.hpp"

#include <cmath>

#include "defix/error.hpp"

namespace defix {

GrowthResult log_growth(const Series& levels, Frequency frequency) {
    GrowthResult out;
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const double prev = levels.values[i - 1];
        const double cur = levels.values[i];
        const Date t = levels.dates[i];
        double g = kMissing;
        if (is_missing(prev) || is_missing(cur) ||
            shift_bucket(bucket_start(t, frequency), frequency, -1) !=
                bucket_start(levels.dates[i - 1], frequency)) {
            ++out.gaps;
        } else if (prev <= 0.0 || cur <= 0.0) {
            ++out.non_positive;
        } else {
            g = std::log(cur) - std::log(prev);
        }
        out.growth.push_back(t, g);
    }
    return out;
}

RatioResult valuation_ratio(const Series& tvl, const Series& mcap) {
    RatioResult out;
    const auto [t, m] = intersect(tvl, mcap);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double a = t.values[i];
        const double b = m.values[i];
        double r = kMissing;
        if (!is_missing(a) && !is_missing(b) && a > 0.0 && b > 0.0) {
            r = a / b;
        } else {
            ++out.missing;
        }
        out.ratio.push_back(t.dates[i], r);
    }
    return out;
}

LogLogFit loglog_fit(const std::vector<double>& tvl, const std::vector<double>& mcap) {
    if (tvl.size() != mcap.size()) {
        throw Error(ErrorCode::InvalidConfig, "tvl and market cap vectors differ in length");
    }
    LogLogFit out;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < tvl.size(); ++i) {
        const double a = tvl[i];
        const double b = mcap[i];
        if (is_missing(a) || is_missing(b) || !(a > 0.0) || !(b > 0.0)) continue;
        out.points.push_back({std::log(a), std::log(b)});
        x.push_back(out.points.back().ln_tvl);
        y.push_back(out.points.back().ln_mcap);
    }
    if (out.points.size() < 3) {
        throw Error(ErrorCode::TooFewObservations, "log-log fit needs at least 3 positive pairs");
    }
    DesignMatrix design;
    design.add("ln_tvl", std::move(x));
    out.regression = ols(y, design, true);
    return out;
}

}  // namespace defix
