#include <doctest.h>

#include "dlmo/core.hpp"
#include "dlmo/errors.hpp"
#include "dlmo/rng.hpp"

using namespace dlmo;

TEST_CASE("date round-trips through day numbers") {
    for (const char* s : {"1970-01-01", "2024-02-29", "2016-11-06", "2013-03-10"}) {
        Date d = parse_date(s);
        CHECK(format_date(date_from_day_number(day_number(d))) == s);
    }
    CHECK(day_number(Date{1970, 1, 1}) == 0);
    CHECK(day_number(Date{1970, 1, 2}) == 1);
    CHECK_THROWS_AS(parse_date("2024-13-01"), ValidationError);
    CHECK_THROWS_AS(parse_date("not a date"), ValidationError);
}

TEST_CASE("clock parsing") {
    CHECK(parse_clock("00:00") == 0.0);
    CHECK(parse_clock("14:30") == doctest::Approx(14.5));
    CHECK(parse_clock("23:59:30") == doctest::Approx(23.0 + 59.0 / 60.0 + 30.0 / 3600.0));
    CHECK_THROWS_AS(parse_clock("24:00"), ValidationError);
    CHECK_THROWS_AS(parse_clock("12:60"), ValidationError);
    CHECK_THROWS_AS(parse_clock("noonish"), ValidationError);
}

TEST_CASE("normalize_dst shifts one hour back and clears the flag") {
    Timestamp ts{Date{2016, 6, 1}, 14.0, true};
    Timestamp norm = normalize_dst(ts);
    CHECK(norm.hour == doctest::Approx(13.0));
    CHECK_FALSE(norm.dst_active);
    CHECK(norm.date == Date{2016, 6, 1});

    Timestamp plain{Date{2016, 6, 1}, 14.0, false};
    Timestamp same = normalize_dst(plain);
    CHECK(same.hour == 14.0);
    CHECK_FALSE(same.dst_active);
}

TEST_CASE("normalize_dst borrows across midnight") {
    Timestamp ts{Date{2016, 6, 1}, 0.5, true};
    Timestamp norm = normalize_dst(ts);
    CHECK(norm.date == Date{2016, 5, 31});
    CHECK(norm.hour == doctest::Approx(23.5));
}

TEST_CASE("normalize_dst is idempotent") {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        Timestamp ts{date_from_day_number(19000 + static_cast<std::int64_t>(rng.below(400))),
                     rng.uniform(0.0, 24.0), rng.below(2) == 1};
        Timestamp once = normalize_dst(ts);
        Timestamp twice = normalize_dst(once);
        CHECK(once.date == twice.date);
        CHECK(once.hour == twice.hour);
        CHECK_FALSE(twice.dst_active);
    }
}

TEST_CASE("to_continuous_hours") {
    const Date anchor{2016, 1, 10};
    CHECK(to_continuous_hours({anchor, 0.0, false}, anchor) == 0.0);
    CHECK(to_continuous_hours({Date{2016, 1, 11}, 1.5, false}, anchor) == doctest::Approx(25.5));
    CHECK(to_continuous_hours({Date{2016, 1, 9}, 23.0, false}, anchor) == doctest::Approx(-1.0));
}

TEST_CASE("to_continuous_hours preserves physical order") {
    Rng rng(8);
    const Date anchor{2016, 1, 10};
    double prev = -1e9;
    for (int day = -3; day < 4; ++day) {
        for (double h : {0.0, 5.25, 12.0, 23.983}) {
            double v = to_continuous_hours(
                {date_from_day_number(day_number(anchor) + day), h, false}, anchor);
            CHECK(v > prev);
            prev = v;
        }
    }
    (void)rng;
}

TEST_CASE("clock_of_day wraps into [0, 24)") {
    CHECK(clock_of_day(27.0) == doctest::Approx(3.0));
    CHECK(clock_of_day(-1.0) == doctest::Approx(23.0));
    CHECK(clock_of_day(24.0) == 0.0);
}

TEST_CASE("sleep_midpoint") {
    CHECK(sleep_midpoint(23.0, 31.0) == 27.0);
    CHECK(sleep_midpoint(0.0, 8.0) == 4.0);
    CHECK_THROWS_AS(sleep_midpoint(22.0, 22.0), InvalidInterval);
    CHECK_THROWS_AS(sleep_midpoint(25.0, 24.0), InvalidInterval);

    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        double a = rng.uniform(0.0, 48.0);
        double b = a + rng.uniform(1e-6, 23.9);
        double m = sleep_midpoint(a, b);
        CHECK(m > a);
        CHECK(m < b);
    }
}

TEST_CASE("floor_to_minute tolerates values a hair below the grid") {
    CHECK(floor_to_minute(7.0 + 5.0 / 60.0) == 425);
    CHECK(floor_to_minute(6.999999999999999) == 420);  // 7:00 computed inexactly
    CHECK(floor_to_minute(0.0) == 0);
    CHECK(floor_to_minute(-1.0 / 60.0) == -1);
}

TEST_CASE("channel names round-trip") {
    for (Channel c : {Channel::LE, Channel::ST, Channel::AC})
        CHECK(channel_from_name(channel_name(c)) == c);
    CHECK_THROWS_AS(channel_from_name("XX"), ValidationError);
}
