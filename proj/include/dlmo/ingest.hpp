#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dlmo/core.hpp"

namespace dlmo {

// One sensor channel at 1-minute cadence. Missing samples are explicit
// absences; sentinel encodings in input files are rejected at load.
struct MinuteSeries {
    Channel channel = Channel::LE;
    std::int64_t start_min = 0;  // minutes since participant anchor midnight
    std::vector<std::optional<double>> values;

    double start_hours() const { return static_cast<double>(start_min) / 60.0; }
    std::int64_t end_min() const { return start_min + static_cast<std::int64_t>(values.size()); }

    // Sample at an absolute minute index, or nullopt outside the range.
    std::optional<double> at_minute(std::int64_t minute) const {
        if (minute < start_min || minute >= end_min()) return std::nullopt;
        return values[static_cast<std::size_t>(minute - start_min)];
    }
};

struct MelatoninSample {
    double time = 0.0;           // hours relative to collection-day midnight
    double concentration = 0.0;  // pg/mL
};

struct MelatoninProfile {
    std::string participant;
    Date collection_day;
    std::vector<MelatoninSample> samples;  // times strictly increasing
};

enum class SplitTag { train, test, unsplit };

struct ParticipantRecord {
    std::string id;
    Date anchor;  // day_index 0 = first calendar day of sensor data
    std::map<Channel, MinuteSeries> series;
    std::vector<SleepRecord> sleep;  // strictly ordered by day_index
    std::vector<MelatoninProfile> melatonin;
    std::vector<DlmoLabel> labels;
    SplitTag split = SplitTag::unsplit;

    int day_index_of(const Date& d) const {
        return static_cast<int>(day_number(d) - day_number(anchor));
    }
    const SleepRecord* find_sleep(int day_index) const;
};

struct Dataset {
    std::vector<ParticipantRecord> participants;  // sorted by id
    SplitTag split_tag = SplitTag::unsplit;

    const ParticipantRecord* find(const std::string& id) const;
    // Participants carrying the given tag, as a Dataset with that tag.
    Dataset subset(SplitTag tag) const;
    bool has_split(SplitTag tag) const;
};

// sqrt(x^2 + y^2 + z^2)
double ac_l2_norm(double x, double y, double z);

// Present raw samples tagged with their absolute minute index. The 8 Hz
// streams arrive minute-aligned, so a minute holds at most 480 samples.
struct RawSample {
    std::int64_t minute = 0;
    double value = 0.0;
};

// Mean of the present samples per minute; a minute with no samples stays
// missing. Input must be sorted by minute.
MinuteSeries downsample_to_minute(Channel channel, const std::vector<RawSample>& raw);

// Build a sleep record from a day index and clock times (hours of day,
// already DST-normalized). Onsets before noon belong to the next calendar
// day; the offset is unwrapped forward until it follows the onset. Throws
// ValidationError when the interval reaches 24 h.
SleepRecord make_sleep_record(const std::string& participant, int day_index,
                              double onset_clock, double offset_clock);

// Load and validate the on-disk dataset. Expects sensors.csv or
// sensors_raw.csv plus sleep.csv; labels.csv, melatonin.csv and splits.csv
// are read when present. Timestamps are DST-normalized and converted to
// continuous hours on each participant's own axis.
Dataset load_dataset(const std::filesystem::path& root);

// Standalone melatonin reader for the extract-dlmo path.
std::vector<MelatoninProfile> load_melatonin_csv(const std::filesystem::path& file);

// labels.csv writer shared by extract-dlmo and the cohort generator.
void write_labels_csv(const std::filesystem::path& file, const std::vector<DlmoLabel>& labels);

}  // namespace dlmo
