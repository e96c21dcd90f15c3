#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace dlmo {

// ---------------------------------------------------------------------------
// Time axis
//
// All instants live on a per-participant "continuous hours" axis: decimal
// hours since midnight of an anchor day (the participant's first study
// day). Values may exceed 24 or go negative; nothing wraps. Clock-of-day is
// recovered with clock_of_day(). Daily quantities (sleep midpoints, DLMO
// labels, melatonin sample times) are expressed relative to the midnight of
// their own day, so a midpoint at 03:00 is 27.0 and a DLMO at 01:30 after
// the collection evening is 25.5.
// ---------------------------------------------------------------------------

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;
    auto operator<=>(const Date&) const = default;
};

// Proleptic Gregorian day number (days since 1970-01-01).
std::int64_t day_number(const Date& d);
Date date_from_day_number(std::int64_t days);

Date parse_date(const std::string& s);  // "YYYY-MM-DD"
std::string format_date(const Date& d);

// "HH:MM", "HH:MM:SS" or "HH:MM:SS.fff" -> hours of day in [0, 24).
double parse_clock(const std::string& s);

struct Timestamp {
    Date date;
    double hour = 0.0;  // hour of day, [0, 24)
    bool dst_active = false;
};

// Shift daylight-saving samples back one hour so every participant shares
// standard time. Idempotent: the flag is cleared after the shift.
Timestamp normalize_dst(Timestamp ts);

// Continuous hours of a (DST-normalized) timestamp relative to anchor-day
// midnight: 24 * (days since anchor) + hour of day.
double to_continuous_hours(const Timestamp& ts, const Date& anchor);

// value mod 24, always in [0, 24).
double clock_of_day(double continuous_hours);

// Arithmetic midpoint of a sleep interval; throws InvalidInterval unless
// onset < offset.
double sleep_midpoint(double onset, double offset);

// Floor a continuous-hours value to the minute grid. Tolerant of values a
// few ULP below a whole minute.
std::int64_t floor_to_minute(double hours);

// ---------------------------------------------------------------------------
// Domain records
// ---------------------------------------------------------------------------

enum class Channel { LE, ST, AC };

const char* channel_name(Channel c);
Channel channel_from_name(const std::string& s);  // throws ValidationError

struct SleepRecord {
    std::string participant;
    int day_index = 0;      // night from evening of day_index to next morning
    double onset = 0.0;     // continuous hours on the participant axis
    double offset = 0.0;
    double midpoint = 0.0;  // (onset + offset) / 2 exactly

    // Midpoint relative to the record's own day midnight (e.g. ~27 for 3 am).
    double midpoint_day_relative() const { return midpoint - 24.0 * day_index; }
};

struct DlmoLabel {
    std::string participant;
    Date collection_day;
    double phi = 0.0;  // DLMO, hours relative to collection-day midnight, [12, 36)
};

}  // namespace dlmo
