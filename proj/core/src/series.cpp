#include "defix/series.hpp"

#include <algorithm>
#include <cstring>

#include "defix/error.hpp"

namespace defix {

void Series::push_back(Date d, double v) {
    if (!dates.empty() && !(dates.back() < d)) {
        throw Error(ErrorCode::SchemaMismatch,
                    "series dates must be strictly increasing at " + format_date(d));
    }
    dates.push_back(d);
    values.push_back(v);
}

std::optional<std::size_t> Series::find(Date d) const {
    const auto it = std::lower_bound(dates.begin(), dates.end(), d);
    if (it == dates.end() || *it != d) return std::nullopt;
    return static_cast<std::size_t>(it - dates.begin());
}

double Series::value_at(Date d) const {
    const auto i = find(d);
    return i ? values[*i] : kMissing;
}

std::vector<double> Series::present_values() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (!is_missing(v)) out.push_back(v);
    }
    return out;
}

std::pair<Series, Series> intersect(const Series& a, const Series& b) {
    Series ra, rb;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a.dates[i] < b.dates[j]) {
            ++i;
        } else if (b.dates[j] < a.dates[i]) {
            ++j;
        } else {
            ra.push_back(a.dates[i], a.values[i]);
            rb.push_back(b.dates[j], b.values[j]);
            ++i;
            ++j;
        }
    }
    return {std::move(ra), std::move(rb)};
}

bool same_values(const Series& a, const Series& b) noexcept {
    if (a.dates != b.dates || a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double x = a.values[i];
        const double y = b.values[i];
        if (is_missing(x) && is_missing(y)) continue;
        if (std::memcmp(&x, &y, sizeof x) != 0) return false;
    }
    return true;
}

}  // namespace defix
