#include "dlmo/ingest.hpp"

#include <algorithm>
#include <cmath>

#include "dlmo/csv.hpp"
#include "dlmo/errors.hpp"

namespace dlmo {

namespace fs = std::filesystem;

const SleepRecord* ParticipantRecord::find_sleep(int day_index) const {
    auto it = std::lower_bound(sleep.begin(), sleep.end(), day_index,
                               [](const SleepRecord& r, int d) { return r.day_index < d; });
    if (it == sleep.end() || it->day_index != day_index) return nullptr;
    return &*it;
}

const ParticipantRecord* Dataset::find(const std::string& id) const {
    auto it = std::lower_bound(participants.begin(), participants.end(), id,
                               [](const ParticipantRecord& p, const std::string& s) {
                                   return p.id < s;
                               });
    if (it == participants.end() || it->id != id) return nullptr;
    return &*it;
}

Dataset Dataset::subset(SplitTag tag) const {
    Dataset out;
    out.split_tag = tag;
    for (const auto& p : participants)
        if (p.split == tag) out.participants.push_back(p);
    return out;
}

bool Dataset::has_split(SplitTag tag) const {
    return std::any_of(participants.begin(), participants.end(),
                       [tag](const ParticipantRecord& p) { return p.split == tag; });
}

double ac_l2_norm(double x, double y, double z) {
    return std::sqrt(x * x + y * y + z * z);
}

SleepRecord make_sleep_record(const std::string& participant, int day_index,
                              double onset_clock, double offset_clock) {
    SleepRecord r;
    r.participant = participant;
    r.day_index = day_index;
    // Onsets before noon belong to the next calendar day; the offset is
    // unwrapped forward until it follows the onset.
    double onset_rel = onset_clock < 12.0 ? onset_clock + 24.0 : onset_clock;
    double offset_rel = offset_clock;
    while (offset_rel <= onset_rel) offset_rel += 24.0;
    r.onset = 24.0 * day_index + onset_rel;
    r.offset = 24.0 * day_index + offset_rel;
    if (r.offset - r.onset >= 24.0)
        throw ValidationError("participant " + participant + ": sleep interval of " +
                              std::to_string(r.offset - r.onset) + " h");
    r.midpoint = sleep_midpoint(r.onset, r.offset);
    return r;
}

MinuteSeries downsample_to_minute(Channel channel, const std::vector<RawSample>& raw) {
    MinuteSeries out;
    out.channel = channel;
    if (raw.empty()) return out;
    out.start_min = raw.front().minute;
    const std::int64_t last = raw.back().minute;
    out.values.assign(static_cast<std::size_t>(last - out.start_min + 1), std::nullopt);

    std::size_t i = 0;
    while (i < raw.size()) {
        const std::int64_t minute = raw[i].minute;
        double sum = 0.0;
        std::size_t count = 0;
        while (i < raw.size() && raw[i].minute == minute) {
            sum += raw[i].value;
            ++count;
            ++i;
        }
        out.values[static_cast<std::size_t>(minute - out.start_min)] = sum / count;
    }
    return out;
}

namespace {

struct PendingSensors {
    // channel -> present samples (minute index, value), possibly >1 per
    // minute for 8 Hz input
    std::map<Channel, std::vector<RawSample>> raw;
    std::map<Channel, bool> minute_cadence;  // true when fed from sensors.csv
    Date anchor;
    bool has_anchor = false;
};

bool parse_dst_flag(const std::string& s, const fs::path& file, std::size_t line) {
    if (s == "0") return false;
    if (s == "1") return true;
    throw ParseError(file.string(), line, "dst_active must be 0 or 1, got '" + s + "'");
}

Timestamp make_timestamp(const std::string& date_s, const std::string& time_s, bool dst,
                         const fs::path& file, std::size_t line) {
    Timestamp ts;
    try {
        ts.date = parse_date(date_s);
        ts.hour = parse_clock(time_s);
    } catch (const ValidationError& e) {
        throw ParseError(file.string(), line, e.what());
    }
    ts.dst_active = dst;
    return normalize_dst(ts);
}

// First pass over a sensor table: the anchor is the earliest normalized
// calendar day per participant.
void scan_anchors(const csv::Table& t, std::map<std::string, PendingSensors>& pending) {
    const std::size_t c_pid = t.column("participant_id");
    const std::size_t c_date = t.column("date");
    const std::size_t c_time = t.column("time");
    const std::size_t c_dst = t.column("dst_active");
    for (const auto& row : t.rows()) {
        const std::string& pid = t.field(row, c_pid);
        if (pid.empty()) throw ParseError(t.path().string(), row.line, "empty participant_id");
        Timestamp ts = make_timestamp(t.field(row, c_date), t.field(row, c_time),
                                      parse_dst_flag(t.field(row, c_dst), t.path(), row.line),
                                      t.path(), row.line);
        auto& p = pending[pid];
        if (!p.has_anchor || day_number(ts.date) < day_number(p.anchor)) {
            p.anchor = ts.date;
            p.has_anchor = true;
        }
    }
}

void load_sensors_csv(const csv::Table& t, std::map<std::string, PendingSensors>& pending) {
    const std::size_t c_pid = t.column("participant_id");
    const std::size_t c_date = t.column("date");
    const std::size_t c_time = t.column("time");
    const std::size_t c_dst = t.column("dst_active");
    const std::size_t c_chan = t.column("channel");
    const std::size_t c_val = t.column("value");

    for (const auto& row : t.rows()) {
        const std::string& pid = t.field(row, c_pid);
        Channel chan;
        try {
            chan = channel_from_name(t.field(row, c_chan));
        } catch (const ValidationError& e) {
            throw ParseError(t.path().string(), row.line, e.what());
        }
        auto& p = pending.at(pid);
        p.minute_cadence[chan] = true;

        const std::string& val_s = t.field(row, c_val);
        if (val_s.empty()) continue;  // explicit missing sample
        double v = csv::parse_double(val_s, t.path(), row.line);
        if (chan == Channel::LE && v < 0.0)
            throw ValidationError("participant " + pid + ": negative lux at " +
                                  t.path().string() + ":" + std::to_string(row.line));
        if (chan == Channel::AC && v < 0.0)
            throw ValidationError("participant " + pid + ": negative AC magnitude at " +
                                  t.path().string() + ":" + std::to_string(row.line));

        Timestamp ts = make_timestamp(t.field(row, c_date), t.field(row, c_time),
                                      parse_dst_flag(t.field(row, c_dst), t.path(), row.line),
                                      t.path(), row.line);
        double hours = to_continuous_hours(ts, p.anchor);
        std::int64_t minute = floor_to_minute(hours);
        if (std::fabs(hours * 60.0 - static_cast<double>(minute)) > 1e-6)
            throw ParseError(t.path().string(), row.line,
                             "sensors.csv timestamps must be on the minute grid");
        p.raw[chan].push_back({minute, v});
    }
}

void load_sensors_raw_csv(const csv::Table& t, std::map<std::string, PendingSensors>& pending) {
    const std::size_t c_pid = t.column("participant_id");
    const std::size_t c_date = t.column("date");
    const std::size_t c_time = t.column("time");
    const std::size_t c_dst = t.column("dst_active");
    const std::size_t c_chan = t.column("channel");
    const std::size_t c_val = t.column("value");
    const std::size_t c_x = t.column("ac_x");
    const std::size_t c_y = t.column("ac_y");
    const std::size_t c_z = t.column("ac_z");

    for (const auto& row : t.rows()) {
        const std::string& pid = t.field(row, c_pid);
        Channel chan;
        try {
            chan = channel_from_name(t.field(row, c_chan));
        } catch (const ValidationError& e) {
            throw ParseError(t.path().string(), row.line, e.what());
        }
        auto& p = pending.at(pid);

        double v;
        if (chan == Channel::AC) {
            const std::string& xs = t.field(row, c_x);
            const std::string& ys = t.field(row, c_y);
            const std::string& zs = t.field(row, c_z);
            if (xs.empty() && ys.empty() && zs.empty()) continue;  // missing sample
            v = ac_l2_norm(csv::parse_double(xs, t.path(), row.line),
                           csv::parse_double(ys, t.path(), row.line),
                           csv::parse_double(zs, t.path(), row.line));
        } else {
            const std::string& vs = t.field(row, c_val);
            if (vs.empty()) continue;
            v = csv::parse_double(vs, t.path(), row.line);
            if (chan == Channel::LE && v < 0.0)
                throw ValidationError("participant " + pid + ": negative lux at " +
                                      t.path().string() + ":" + std::to_string(row.line));
        }

        Timestamp ts = make_timestamp(t.field(row, c_date), t.field(row, c_time),
                                      parse_dst_flag(t.field(row, c_dst), t.path(), row.line),
                                      t.path(), row.line);
        double hours = to_continuous_hours(ts, p.anchor);
        // 8 Hz rows land inside a minute; assignment is by containing minute.
        p.raw[chan].push_back({floor_to_minute(hours), v});
    }
}

void load_sleep_csv(const csv::Table& t, std::map<std::string, ParticipantRecord>& recs) {
    const std::size_t c_pid = t.column("participant_id");
    const std::size_t c_day = t.column("day_index");
    const std::size_t c_on = t.column("onset_clock");
    const std::size_t c_off = t.column("offset_clock");
    const std::size_t c_dst = t.column("dst_active");

    for (const auto& row : t.rows()) {
        const std::string& pid = t.field(row, c_pid);
        if (pid.empty()) throw ParseError(t.path().string(), row.line, "empty participant_id");
        SleepRecord r;
        r.participant = pid;
        r.day_index = static_cast<int>(csv::parse_int(t.field(row, c_day), t.path(), row.line));
        bool dst = parse_dst_flag(t.field(row, c_dst), t.path(), row.line);

        double onset_clock, offset_clock;
        try {
            onset_clock = parse_clock(t.field(row, c_on));
            offset_clock = parse_clock(t.field(row, c_off));
        } catch (const ValidationError& e) {
            throw ParseError(t.path().string(), row.line, e.what());
        }
        if (dst) {
            onset_clock = onset_clock - 1.0 < 0.0 ? onset_clock + 23.0 : onset_clock - 1.0;
            offset_clock = offset_clock - 1.0 < 0.0 ? offset_clock + 23.0 : offset_clock - 1.0;
        }

        try {
            r = make_sleep_record(pid, r.day_index, onset_clock, offset_clock);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(e.what()) + " at " + t.path().string() + ":" +
                                  std::to_string(row.line));
        }
        auto& rec = recs[pid];
        rec.id = pid;
        rec.sleep.push_back(std::move(r));
    }
}

void load_labels_csv(const csv::Table& t, std::map<std::string, ParticipantRecord>& recs) {
    const std::size_t c_pid = t.column("participant_id");
    const std::size_t c_date = t.column("collection_date");
    const std::size_t c_phi = t.column("dlmo_hours");

    for (const auto& row : t.rows()) {
        const std::string& pid = t.field(row, c_pid);
        DlmoLabel label;
        label.participant = pid;
        try {
            label.collection_day = parse_date(t.field(row, c_date));
        } catch (const ValidationError& e) {
            throw ParseError(t.path().string(), row.line, e.what());
        }
        label.phi = csv::parse_double(t.field(row, c_phi), t.path(), row.line);
        if (label.phi < 12.0 || label.phi >= 36.0)
            throw ValidationError("participant " + pid + ": dlmo_hours " +
                                  csv::format_g9(label.phi) + " outside [12, 36) at " +
                                  t.path().string() + ":" + std::to_string(row.line));
        auto& rec = recs[pid];
        rec.id = pid;
        rec.labels.push_back(std::move(label));
    }
}

struct MelatoninRow {
    std::string participant;
    Date date;
    double hour;
    double concentration;
};

std::vector<MelatoninProfile> profiles_from_rows(std::vector<MelatoninRow> rows,
                                                 const std::string& file) {
    std::stable_sort(rows.begin(), rows.end(), [](const MelatoninRow& a, const MelatoninRow& b) {
        if (a.participant != b.participant) return a.participant < b.participant;
        if (a.date != b.date) return day_number(a.date) < day_number(b.date);
        return a.hour < b.hour;
    });

    std::vector<MelatoninProfile> out;
    for (std::size_t i = 0; i < rows.size();) {
        MelatoninProfile prof;
        prof.participant = rows[i].participant;
        prof.collection_day = rows[i].date;
        const std::int64_t day0 = day_number(prof.collection_day);
        double prev = -1e300;
        // Consecutive nightly collections are >= 8 h apart (07:00 -> 15:00),
        // so a 6 h gap separates profiles while tolerating skipped samples.
        while (i < rows.size() && rows[i].participant == prof.participant) {
            double t = 24.0 * static_cast<double>(day_number(rows[i].date) - day0) + rows[i].hour;
            if (!prof.samples.empty() && t - prev > 6.0) break;
            if (t <= prev)
                throw ValidationError("participant " + prof.participant +
                                      ": melatonin sample times not strictly increasing in " + file);
            prof.samples.push_back({t, rows[i].concentration});
            prev = t;
            ++i;
        }
        out.push_back(std::move(prof));
    }
    return out;
}

std::vector<MelatoninRow> read_melatonin_rows(const fs::path& file) {
    csv::Table t = csv::read_file(file);
    const std::size_t c_pid = t.column("participant_id");
    const std::size_t c_clock = t.column("sample_clock");
    const std::size_t c_dst = t.column("dst_active");
    const std::size_t c_conc = t.column("concentration_pg_ml");

    std::vector<MelatoninRow> rows;
    for (const auto& row : t.rows()) {
        MelatoninRow r;
        r.participant = t.field(row, c_pid);
        if (r.participant.empty())
            throw ParseError(file.string(), row.line, "empty participant_id");

        // sample_clock is a full local timestamp "YYYY-MM-DD HH:MM[:SS]"
        // (or with 'T'); the date is needed to recover the collection day.
        const std::string& clock = t.field(row, c_clock);
        std::size_t sep = clock.find_first_of(" T");
        if (sep == std::string::npos)
            throw ParseError(file.string(), row.line,
                             "sample_clock must be 'YYYY-MM-DD HH:MM', got '" + clock + "'");
        Timestamp ts = make_timestamp(clock.substr(0, sep), clock.substr(sep + 1),
                                      parse_dst_flag(t.field(row, c_dst), file, row.line),
                                      file, row.line);
        r.date = ts.date;
        r.hour = ts.hour;
        r.concentration = csv::parse_double(t.field(row, c_conc), file, row.line);
        if (!(r.concentration >= 0.0) || !std::isfinite(r.concentration))
            throw ValidationError("participant " + r.participant +
                                  ": melatonin concentration must be finite and >= 0 at " +
                                  file.string() + ":" + std::to_string(row.line));
        rows.push_back(std::move(r));
    }
    return rows;
}

void load_splits_csv(const csv::Table& t, std::map<std::string, ParticipantRecord>& recs) {
    const std::size_t c_pid = t.column("participant_id");
    const std::size_t c_split = t.column("split");
    for (const auto& row : t.rows()) {
        const std::string& pid = t.field(row, c_pid);
        const std::string& s = t.field(row, c_split);
        auto it = recs.find(pid);
        if (it == recs.end())
            throw ValidationError("splits.csv names unknown participant '" + pid + "'");
        if (s == "train") it->second.split = SplitTag::train;
        else if (s == "test") it->second.split = SplitTag::test;
        else
            throw ParseError(t.path().string(), row.line, "split must be train|test, got '" + s + "'");
    }
}

}  // namespace

std::vector<MelatoninProfile> load_melatonin_csv(const fs::path& file) {
    return profiles_from_rows(read_melatonin_rows(file), file.string());
}

Dataset load_dataset(const fs::path& root) {
    const fs::path sensors_path = root / "sensors.csv";
    const fs::path sensors_raw_path = root / "sensors_raw.csv";
    const bool have_plain = fs::exists(sensors_path);
    const bool have_raw = fs::exists(sensors_raw_path);
    if (!have_plain && !have_raw)
        throw IoError("no sensors.csv or sensors_raw.csv under " + root.string());
    if (have_plain && have_raw)
        throw ValidationError("both sensors.csv and sensors_raw.csv present under " +
                              root.string() + "; ambiguous");

    std::map<std::string, PendingSensors> pending;
    {
        csv::Table t = csv::read_file(have_plain ? sensors_path : sensors_raw_path);
        scan_anchors(t, pending);
        if (have_plain) load_sensors_csv(t, pending);
        else load_sensors_raw_csv(t, pending);
    }

    std::map<std::string, ParticipantRecord> recs;
    for (auto& [pid, p] : pending) {
        ParticipantRecord& rec = recs[pid];
        rec.id = pid;
        rec.anchor = p.anchor;
        for (auto& [chan, raw] : p.raw) {
            std::stable_sort(raw.begin(), raw.end(),
                             [](const RawSample& a, const RawSample& b) { return a.minute < b.minute; });
            if (p.minute_cadence.count(chan) && p.minute_cadence.at(chan)) {
                for (std::size_t i = 1; i < raw.size(); ++i)
                    if (raw[i].minute == raw[i - 1].minute)
                        throw ValidationError("participant " + pid + ": duplicate " +
                                              std::string(channel_name(chan)) +
                                              " sample for one minute");
            }
            rec.series[chan] = downsample_to_minute(chan, raw);
        }
    }

    if (fs::exists(root / "sleep.csv")) {
        csv::Table t = csv::read_file(root / "sleep.csv");
        load_sleep_csv(t, recs);
    }
    if (fs::exists(root / "labels.csv")) {
        csv::Table t = csv::read_file(root / "labels.csv");
        load_labels_csv(t, recs);
    }
    if (fs::exists(root / "melatonin.csv")) {
        for (auto& prof : load_melatonin_csv(root / "melatonin.csv")) {
            auto it = recs.find(prof.participant);
            if (it == recs.end())
                throw ValidationError("melatonin.csv names participant '" + prof.participant +
                                      "' with no sensor data");
            it->second.melatonin.push_back(std::move(prof));
        }
    }
    if (fs::exists(root / "splits.csv")) {
        csv::Table t = csv::read_file(root / "splits.csv");
        load_splits_csv(t, recs);
    }

    // Cross-record validation.
    for (auto& [pid, rec] : recs) {
        std::sort(rec.sleep.begin(), rec.sleep.end(),
                  [](const SleepRecord& a, const SleepRecord& b) { return a.day_index < b.day_index; });
        for (std::size_t i = 1; i < rec.sleep.size(); ++i)
            if (rec.sleep[i].day_index == rec.sleep[i - 1].day_index)
                throw ValidationError("participant " + pid + ": duplicate sleep day_index " +
                                      std::to_string(rec.sleep[i].day_index));

        for (const auto& label : rec.labels) {
            const int d = rec.day_index_of(label.collection_day);
            const std::int64_t lo = static_cast<std::int64_t>(d) * 24 * 60;
            const std::int64_t hi = lo + 24 * 60;
            bool covered = false;
            for (const auto& [chan, series] : rec.series) {
                (void)chan;
                for (std::int64_t m = std::max(lo, series.start_min);
                     m < std::min(hi, series.end_min()) && !covered; ++m)
                    covered = series.at_minute(m).has_value();
                if (covered) break;
            }
            if (!covered)
                throw ValidationError("participant " + pid + ": label on " +
                                      format_date(label.collection_day) +
                                      " has no sensor data on the collection day");
        }
        std::sort(rec.labels.begin(), rec.labels.end(),
                  [](const DlmoLabel& a, const DlmoLabel& b) {
                      return day_number(a.collection_day) < day_number(b.collection_day);
                  });
    }

    Dataset ds;
    for (auto& [pid, rec] : recs) ds.participants.push_back(std::move(rec));
    // std::map iteration is already id-sorted.
    return ds;
}

void write_labels_csv(const fs::path& file, const std::vector<DlmoLabel>& labels) {
    csv::Writer w(file);
    w.row({"participant_id", "collection_date", "dlmo_hours"});
    for (const auto& l : labels)
        w.row({l.participant, format_date(l.collection_day), csv::format_g9(l.phi)});
    w.close();
}

}  // namespace dlmo
