#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace od {

using Date = std::chrono::sys_days;

/// Parses "YYYY-MM-DD"; throws std::invalid_argument on malformed input.
Date parse_date(std::string_view text);

std::string format_date(Date d);

/// Monday of the ISO week containing d.
Date monday_of(Date d);

/// First day of the month containing d.
Date first_of_month(Date d);

/// Last day of the month that lies `months_ahead` months after d's month.
Date last_of_month_after(Date d, int months_ahead);

/// Consecutive Monday-start 7-day spans. Week 0 begins on first_monday.
struct WeekCalendar {
    Date first_monday;
    int num_weeks = 0;

    WeekCalendar() = default;
    WeekCalendar(Date first, int weeks);

    /// Week index containing d, or nullopt when d falls outside the calendar.
    std::optional<int> week_of(Date d) const;

    Date week_start(int week) const { return first_monday + std::chrono::days(7 * week); }
    Date last_day() const { return first_monday + std::chrono::days(7 * num_weeks - 1); }
};

} // namespace od
