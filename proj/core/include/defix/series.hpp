#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "defix/date.hpp"

namespace defix {

/// Quiet NaN marks a missing value throughout the library.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

/// Dated values with strictly increasing dates.
struct Series {
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const noexcept { return dates.size(); }
    bool empty() const noexcept { return dates.empty(); }

    /// Appends; throws if `d` does not come after the last date.
    void push_back(Date d, double v);

    /// Binary search; nullopt when the date is absent.
    std::optional<std::size_t> find(Date d) const;
    /// Value at `d`, kMissing when the date is absent.
    double value_at(Date d) const;

    /// Values with missing entries removed, in date order.
    std::vector<double> present_values() const;
};

/// Keeps only the dates present in both series, in order.
std::pair<Series, Series> intersect(const Series& a, const Series& b);

/// Bit-level equality that treats NaN == NaN (missing equals missing).
bool same_values(const Series& a, const Series& b) noexcept;

}  // namespace defix
