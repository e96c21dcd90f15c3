#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlmo/core.hpp"
#include "dlmo/ingest.hpp"
#include "dlmo/linalg.hpp"

namespace dlmo {

// One channel at 1-hour cadence.
struct HourlySeries {
    Channel channel = Channel::LE;
    std::int64_t start_hour = 0;  // hours since participant anchor midnight
    std::vector<std::optional<double>> values;
};

// 24 hourly feature rows starting at the wake-up minute of the label day.
// Row h covers [wake_time + h, wake_time + h + 1). Fully imputed: no
// missing entries survive assembly.
struct DayWindow {
    std::string participant;
    double wake_time = 0.0;          // continuous hours, participant axis
    std::vector<Channel> channels;   // column order of `features`
    Mat features;                    // 24 x channels.size()

    int channel_column(Channel c) const;  // -1 when absent
};

// The n sleep midpoints preceding a label day, oldest first, each relative
// to its own day's midnight (typical values around 27 = 03:00).
struct MidpointWindow {
    std::string participant;
    std::vector<double> midpoints;

    int n() const { return static_cast<int>(midpoints.size()); }
};

// log10(lux + 1); throws DomainError for negative input.
double log_transform_le(double lux);

// Mean of present minute samples per clock-aligned hour bin; an hour with
// no present samples stays missing.
HourlySeries hourly_bin(const MinuteSeries& ms);

// Fill every maximal missing run of length <= max_gap_hours that is
// bounded by present values on both sides, by linear interpolation between
// the bounding values. Longer runs and boundary runs are left missing.
HourlySeries impute_gaps(HourlySeries hs, int max_gap_hours = 12);

// Build the 24 x F feature matrix for the day window starting at the wake
// time of `label_day`. LE is log-transformed before binning. Throws
// MissingSleepRecord when the waking sleep record is absent and
// ExcessiveGap when any selected channel has a window-internal missing run
// longer than max_gap_hours. Interior gaps are linearly interpolated;
// boundary gaps (necessarily <= max_gap_hours here) extend the nearest
// present bin.
DayWindow assemble_day_window(const ParticipantRecord& rec, const Date& label_day,
                              const std::vector<Channel>& channels,
                              int max_gap_hours = 12);

// Gather the midpoints of the n sleep records preceding `label_day`.
// Throws InsufficientHistory (with the available count) when any of the n
// days lacks a record.
MidpointWindow assemble_midpoint_window(const ParticipantRecord& rec, const Date& label_day,
                                        int n);

// {LE, ST, AC} order used for feature columns everywhere.
std::vector<Channel> canonical_channels(const std::vector<Channel>& subset);
std::vector<Channel> parse_channel_list(const std::string& csv_list);  // "le,st,ac"

}  // namespace dlmo
