#include <doctest.h>

#include <cmath>
#include <functional>
#include <optional>

#include "dlmo/errors.hpp"
#include "dlmo/preprocess.hpp"
#include "dlmo/rng.hpp"

using namespace dlmo;

namespace {

MinuteSeries series_from(Channel ch, std::int64_t start_min,
                         const std::vector<std::optional<double>>& vals) {
    MinuteSeries ms;
    ms.channel = ch;
    ms.start_min = start_min;
    ms.values = vals;
    return ms;
}

// Participant with one sleep record (wake 07:00 of day 1) and constant or
// generated minute data over days 0..1.
ParticipantRecord fixture_record(const std::function<std::optional<double>(Channel, std::int64_t)>& gen) {
    ParticipantRecord rec;
    rec.id = "t";
    rec.anchor = Date{2016, 1, 10};
    rec.sleep.push_back(make_sleep_record("t", 0, 23.0, 7.0));
    for (Channel ch : {Channel::LE, Channel::ST, Channel::AC}) {
        std::vector<std::optional<double>> vals;
        for (std::int64_t m = 0; m < 3 * 24 * 60; ++m) vals.push_back(gen(ch, m));
        rec.series[ch] = series_from(ch, 0, vals);
    }
    return rec;
}

const Date kDay1{2016, 1, 11};

}  // namespace

TEST_CASE("log_transform_le") {
    CHECK(log_transform_le(0.0) == 0.0);
    CHECK(log_transform_le(9.0) == doctest::Approx(1.0));
    CHECK(log_transform_le(999.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(log_transform_le(-0.5), DomainError);

    Rng rng(2);
    double prev_x = 0.0, prev_y = log_transform_le(0.0);
    for (int i = 0; i < 50; ++i) {
        double x = prev_x + rng.uniform(1e-3, 50.0);
        double y = log_transform_le(x);
        CHECK(y > prev_y);
        prev_x = x;
        prev_y = y;
    }
}

TEST_CASE("hourly_bin") {
    std::vector<std::optional<double>> mins(60, 3.25);
    HourlySeries hs = hourly_bin(series_from(Channel::ST, 120, mins));
    CHECK(hs.start_hour == 2);
    REQUIRE(hs.values.size() == 1);
    CHECK(*hs.values[0] == doctest::Approx(3.25));

    std::vector<std::optional<double>> ramp;
    for (int i = 0; i < 60; ++i) ramp.push_back(double(i));
    HourlySeries hr = hourly_bin(series_from(Channel::ST, 0, ramp));
    CHECK(*hr.values[0] == doctest::Approx(29.5));

    std::vector<std::optional<double>> gap(60, std::nullopt);
    HourlySeries hg = hourly_bin(series_from(Channel::ST, 0, gap));
    REQUIRE(hg.values.size() == 1);
    CHECK_FALSE(hg.values[0].has_value());
}

TEST_CASE("hourly_bin output lies within the hour's sample range") {
    Rng rng(3);
    std::vector<std::optional<double>> mins;
    for (int i = 0; i < 240; ++i)
        mins.push_back(rng.below(4) == 0 ? std::nullopt
                                         : std::optional<double>(rng.uniform(-5.0, 5.0)));
    HourlySeries hs = hourly_bin(series_from(Channel::AC, 0, mins));
    for (std::size_t h = 0; h < hs.values.size(); ++h) {
        if (!hs.values[h]) continue;
        double lo = 1e9, hi = -1e9;
        for (int i = 0; i < 60; ++i) {
            auto v = mins[h * 60 + i];
            if (v) {
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
            }
        }
        CHECK(*hs.values[h] >= lo - 1e-12);
        CHECK(*hs.values[h] <= hi + 1e-12);
    }
}

TEST_CASE("impute_gaps fills bounded short runs linearly") {
    HourlySeries hs;
    hs.channel = Channel::LE;
    hs.start_hour = 0;
    hs.values = {1.0, std::nullopt, std::nullopt, 7.0};
    HourlySeries out = impute_gaps(hs);
    REQUIRE(out.values.size() == 4);
    CHECK(*out.values[1] == doctest::Approx(3.0));
    CHECK(*out.values[2] == doctest::Approx(5.0));

    // A 13-hour run stays missing.
    HourlySeries long_run;
    long_run.channel = Channel::LE;
    long_run.values.push_back(1.0);
    for (int i = 0; i < 13; ++i) long_run.values.push_back(std::nullopt);
    long_run.values.push_back(2.0);
    HourlySeries kept = impute_gaps(long_run);
    for (int i = 1; i <= 13; ++i) CHECK_FALSE(kept.values[i].has_value());

    // Identity on fully present input.
    HourlySeries full;
    full.values = {1.0, 2.0, 3.0};
    HourlySeries same = impute_gaps(full);
    CHECK(*same.values[0] == 1.0);
    CHECK(*same.values[1] == 2.0);
    CHECK(*same.values[2] == 3.0);
}

TEST_CASE("impute_gaps leaves boundary runs and never touches present values") {
    Rng rng(4);
    for (int rep = 0; rep < 100; ++rep) {
        HourlySeries hs;
        hs.channel = Channel::ST;
        const int n = 30 + static_cast<int>(rng.below(30));
        for (int i = 0; i < n; ++i)
            hs.values.push_back(rng.below(3) == 0
                                    ? std::nullopt
                                    : std::optional<double>(rng.uniform(-10.0, 10.0)));
        HourlySeries out = impute_gaps(hs, 12);
        REQUIRE(out.values.size() == hs.values.size());
        for (int i = 0; i < n; ++i) {
            if (hs.values[i]) {
                CHECK(*out.values[i] == *hs.values[i]);  // untouched
            } else if (out.values[i]) {
                // Filled: must be a bounded run of length <= 12; value must
                // match the interpolation line exactly.
                int a = i;
                while (a > 0 && !hs.values[a - 1]) --a;
                int b = i;
                while (b + 1 < n && !hs.values[b + 1]) ++b;
                REQUIRE(a > 0);
                REQUIRE(b < n - 1);
                const int len = b - a + 1;
                CHECK(len <= 12);
                const double lo = *hs.values[a - 1];
                const double hi = *hs.values[b + 1];
                const double expect = lo + (hi - lo) / (len + 1) * (i - a + 1);
                CHECK(*out.values[i] == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("assemble_midpoint_window") {
    ParticipantRecord rec;
    rec.id = "t";
    rec.anchor = Date{2016, 1, 10};
    for (int d = 0; d < 7; ++d)
        rec.sleep.push_back(make_sleep_record("t", d, 23.0 + 0.1 * d, 7.0));

    const Date label_day = date_from_day_number(day_number(rec.anchor) + 7);
    MidpointWindow w7 = assemble_midpoint_window(rec, label_day, 7);
    REQUIRE(w7.n() == 7);
    CHECK(w7.midpoints.front() == doctest::Approx(27.0));       // oldest first
    CHECK(w7.midpoints.back() == doctest::Approx(27.0 + 0.3));  // (23.6+31)/2 - relative

    MidpointWindow w3 = assemble_midpoint_window(rec, label_day, 3);
    REQUIRE(w3.n() == 3);
    CHECK(w3.midpoints[0] == doctest::Approx(w7.midpoints[4]));

    const Date later = date_from_day_number(day_number(rec.anchor) + 9);
    CHECK_THROWS_AS(assemble_midpoint_window(rec, later, 7), InsufficientHistory);
    try {
        assemble_midpoint_window(rec, later, 7);
    } catch (const InsufficientHistory& e) {
        CHECK(e.available() == 5);
    }
}

TEST_CASE("assemble_day_window: full data, wake-relative rows, log LE") {
    ParticipantRecord rec = fixture_record([](Channel ch, std::int64_t m) {
        switch (ch) {
            case Channel::LE: return std::optional<double>(9.0 + (m % 60 == 0 ? 0.0 : 0.0));
            case Channel::ST: return std::optional<double>(33.0);
            case Channel::AC: return std::optional<double>(0.5);
        }
        return std::optional<double>();
    });
    DayWindow win = assemble_day_window(rec, kDay1, {Channel::LE, Channel::ST, Channel::AC});
    CHECK(win.wake_time == doctest::Approx(31.0));
    CHECK(win.features.rows == 24);
    CHECK(win.features.cols == 3);
    for (int h = 0; h < 24; ++h) {
        CHECK(win.features(h, 0) == doctest::Approx(1.0));  // log10(9+1)
        CHECK(win.features(h, 1) == doctest::Approx(33.0));
        CHECK(win.features(h, 2) == doctest::Approx(0.5));
    }

    DayWindow le_only = assemble_day_window(rec, kDay1, {Channel::LE});
    CHECK(le_only.features.cols == 1);
    CHECK(le_only.channel_column(Channel::LE) == 0);
    CHECK(le_only.channel_column(Channel::ST) == -1);
}

TEST_CASE("assemble_day_window: wake-relative binning uses the right minutes") {
    // Value = minute index; row h must average [wake+60h, wake+60h+60).
    ParticipantRecord rec = fixture_record([](Channel ch, std::int64_t m) {
        if (ch != Channel::ST) return std::optional<double>(1.0);
        return std::optional<double>(static_cast<double>(m));
    });
    DayWindow win = assemble_day_window(rec, kDay1, {Channel::ST});
    const std::int64_t wake_min = 31 * 60;
    for (int h = 0; h < 24; ++h) {
        const double expect = static_cast<double>(wake_min + 60 * h) + 29.5;
        CHECK(win.features(h, 0) == doctest::Approx(expect));
    }
}

TEST_CASE("assemble_day_window rejects a 13-hour gap and fills a 12-hour one") {
    auto gen = [](int gap_hours) {
        return [gap_hours](Channel ch, std::int64_t m) -> std::optional<double> {
            if (ch == Channel::LE) {
                // Gap inside the window: wake is minute 1860.
                const std::int64_t gap_start = 1860 + 4 * 60;
                if (m >= gap_start && m < gap_start + gap_hours * 60) return std::nullopt;
                return 99.0;
            }
            return 1.0;
        };
    };
    ParticipantRecord bad = fixture_record(gen(13));
    CHECK_THROWS_AS(assemble_day_window(bad, kDay1, {Channel::LE}), ExcessiveGap);
    try {
        assemble_day_window(bad, kDay1, {Channel::LE});
    } catch (const ExcessiveGap& e) {
        CHECK(e.channel() == std::string("LE"));
        CHECK(e.run_hours() == 13);
    }

    ParticipantRecord ok = fixture_record(gen(12));
    DayWindow win = assemble_day_window(ok, kDay1, {Channel::LE});
    for (int h = 0; h < 24; ++h) CHECK(std::isfinite(win.features(h, 0)));
    // Interior fill is the interpolation line between log10(100) and log10(100).
    CHECK(win.features(8, 0) == doctest::Approx(2.0));
}

TEST_CASE("assemble_day_window requires the waking sleep record") {
    ParticipantRecord rec = fixture_record([](Channel, std::int64_t) {
        return std::optional<double>(1.0);
    });
    const Date day2 = date_from_day_number(day_number(rec.anchor) + 2);
    CHECK_THROWS_AS(assemble_day_window(rec, day2, {Channel::LE}), MissingSleepRecord);
}

TEST_CASE("parse_channel_list canonicalizes order") {
    auto chans = parse_channel_list("st,le");
    REQUIRE(chans.size() == 2);
    CHECK(chans[0] == Channel::LE);
    CHECK(chans[1] == Channel::ST);
    CHECK_THROWS_AS(parse_channel_list("xx"), ConfigError);
    CHECK_THROWS_AS(parse_channel_list(""), ConfigError);
}
