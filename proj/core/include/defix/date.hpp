#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace defix {

/// Calendar day, UTC. No intraday component anywhere in the library.
using Date = std::chrono::sys_days;

enum class Frequency { daily, weekly, monthly };

std::string_view to_string(Frequency f) noexcept;
Frequency parse_frequency(std::string_view text);

/// Strict ISO-8601 `YYYY-MM-DD`. Throws Error{BadDate}.
Date parse_date(std::string_view text);
std::string format_date(Date d);

Date make_date(int year, unsigned month, unsigned day);

/// Sunday on or before `d`.
Date week_start(Date d);
/// First day of the month containing `d`.
Date month_start(Date d);
/// Bucket label for `d` at the given frequency (identity for daily).
Date bucket_start(Date d, Frequency f);
/// Shift a bucket label by `steps` buckets (negative steps go back).
Date shift_bucket(Date bucket, Frequency f, int steps);

}  // namespace defix
