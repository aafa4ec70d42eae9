#include "defix/date.hpp"

#include <charconv>
#include <cstdio>

#include "defix/error.hpp"

namespace defix {

namespace chr = std::chrono;

std::string_view to_string(Frequency f) noexcept {
    switch (f) {
    case Frequency::daily: return "daily";
    case Frequency::weekly: return "weekly";
    case Frequency::monthly: return "monthly";
    }
    return "daily";
}

Frequency parse_frequency(std::string_view text) {
    if (text == "daily") return Frequency::daily;
    if (text == "weekly") return Frequency::weekly;
    if (text == "monthly") return Frequency::monthly;
    throw Error(ErrorCode::InvalidConfig, "unknown frequency '" + std::string(text) + "'");
}

namespace {

bool parse_uint(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Date parse_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        !parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d)) {
        throw Error(ErrorCode::BadDate, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)},
                                  chr::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw Error(ErrorCode::BadDate, "not a calendar date: '" + std::string(text) + "'");
    }
    return Date{ymd};
}

std::string format_date(Date d) {
    const chr::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date make_date(int year, unsigned month, unsigned day) {
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    if (!ymd.ok()) {
        throw Error(ErrorCode::BadDate, "invalid calendar date");
    }
    return Date{ymd};
}

Date week_start(Date d) {
    const chr::weekday wd{d};
    return d - chr::days{wd.c_encoding()};  // c_encoding: Sunday == 0
}

Date month_start(Date d) {
    const chr::year_month_day ymd{d};
    return Date{ymd.year() / ymd.month() / chr::day{1}};
}

Date bucket_start(Date d, Frequency f) {
    switch (f) {
    case Frequency::daily: return d;
    case Frequency::weekly: return week_start(d);
    case Frequency::monthly: return month_start(d);
    }
    return d;
}

Date shift_bucket(Date bucket, Frequency f, int steps) {
    switch (f) {
    case Frequency::daily: return bucket + chr::days{steps};
    case Frequency::weekly: return bucket + chr::days{7 * steps};
    case Frequency::monthly: {
        const chr::year_month_day ymd{month_start(bucket)};
        return Date{chr::year_month_day{ymd.year() / ymd.month() / chr::day{1}} +
                    chr::months{steps}};
    }
    }
    return bucket;
}

}  // namespace defix
