#include "dlmo/core.hpp"

#include <cmath>
#include <cstdio>

#include "dlmo/errors.hpp"

namespace dlmo {

// Howard Hinnant's civil <-> day-number algorithms.
std::int64_t day_number(const Date& d) {
    std::int64_t y = d.year;
    unsigned m = static_cast<unsigned>(d.month);
    unsigned dd = static_cast<unsigned>(d.day);
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + dd - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date date_from_day_number(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

Date parse_date(const std::string& s) {
    int y = 0, m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3 ||
        m < 1 || m > 12 || d < 1 || d > 31)
        throw ValidationError("malformed date '" + s + "', expected YYYY-MM-DD");
    return Date{y, m, d};
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

double parse_clock(const std::string& s) {
    int h = 0, m = 0;
    double sec = 0.0;
    char tail = 0;
    int n = std::sscanf(s.c_str(), "%d:%d:%lf%c", &h, &m, &sec, &tail);
    if (n < 2) throw ValidationError("malformed clock time '" + s + "'");
    if (n == 2) {
        // No seconds; make sure nothing trails the minutes.
        if (std::sscanf(s.c_str(), "%d:%d%c", &h, &m, &tail) != 2)
            throw ValidationError("malformed clock time '" + s + "'");
        sec = 0.0;
    } else if (n == 4) {
        throw ValidationError("malformed clock time '" + s + "'");
    }
    if (h < 0 || h > 23 || m < 0 || m > 59 || sec < 0.0 || sec >= 60.0)
        throw ValidationError("clock time out of range '" + s + "'");
    return h + m / 60.0 + sec / 3600.0;
}

Timestamp normalize_dst(Timestamp ts) {
    if (!ts.dst_active) return ts;
    ts.dst_active = false;
    ts.hour -= 1.0;
    if (ts.hour < 0.0) {
        ts.hour += 24.0;
        ts.date = date_from_day_number(day_number(ts.date) - 1);
    }
    return ts;
}

double to_continuous_hours(const Timestamp& ts, const Date& anchor) {
    return 24.0 * static_cast<double>(day_number(ts.date) - day_number(anchor)) + ts.hour;
}

double clock_of_day(double continuous_hours) {
    double r = std::fmod(continuous_hours, 24.0);
    if (r < 0.0) r += 24.0;
    return r;
}

double sleep_midpoint(double onset, double offset) {
    if (!(onset < offset))
        throw InvalidInterval("sleep onset must precede offset (got onset=" +
                              std::to_string(onset) + ", offset=" + std::to_string(offset) + ")");
    return (onset + offset) / 2.0;
}

std::int64_t floor_to_minute(double hours) {
    return static_cast<std::int64_t>(std::floor(hours * 60.0 + 1e-9));
}

const char* channel_name(Channel c) {
    switch (c) {
        case Channel::LE: return "LE";
        case Channel::ST: return "ST";
        case Channel::AC: return "AC";
    }
    return "?";
}

Channel channel_from_name(const std::string& s) {
    if (s == "LE") return Channel::LE;
    if (s == "ST") return Channel::ST;
    if (s == "AC") return Channel::AC;
    throw ValidationError("unknown channel '" + s + "'");
}

}  // namespace dlmo
