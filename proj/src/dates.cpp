#include "od/dates.hpp"

#include <cstdio>
#include <stdexcept>

namespace od {

Date parse_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    char tail = 0;
    std::string buf(text);
    if (std::sscanf(buf.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3)
        throw std::invalid_argument("bad date '" + buf + "' (expected YYYY-MM-DD)");
    std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(unsigned(m)),
                                    std::chrono::day(unsigned(d))};
    if (!ymd.ok())
        throw std::invalid_argument("bad date '" + buf + "' (not a calendar day)");
    return std::chrono::sys_days(ymd);
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

Date monday_of(Date d) {
    std::chrono::weekday wd{d};
    auto back = (wd - std::chrono::Monday).count();
    return d - std::chrono::days(back);
}

Date first_of_month(Date d) {
    std::chrono::year_month_day ymd{d};
    return std::chrono::sys_days(ymd.year() / ymd.month() / std::chrono::day(1));
}

Date last_of_month_after(Date d, int months_ahead) {
    std::chrono::year_month_day ymd{d};
    std::chrono::year_month ym = ymd.year() / ymd.month();
    ym += std::chrono::months(months_ahead);
    return std::chrono::sys_days(ym / std::chrono::last);
}

WeekCalendar::WeekCalendar(Date first, int weeks) : first_monday(first), num_weeks(weeks) {
    if (std::chrono::weekday{first} != std::chrono::Monday)
        throw std::invalid_argument("calendar start " + format_date(first) + " is not a Monday");
    if (weeks < 1)
        throw std::invalid_argument("calendar needs at least one week");
}

std::optional<int> WeekCalendar::week_of(Date d) const {
    auto offset = (d - first_monday).count();
    if (offset < 0 || offset >= 7L * num_weeks) return std::nullopt;
    return static_cast<int>(offset / 7);
}

} // namespace od
