#include "dlmo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dlmo/csv.hpp"
#include "dlmo/errors.hpp"

namespace dlmo {

namespace fs = std::filesystem;

namespace {

const Date kAnchor{2024, 3, 4};
constexpr double kMidOffsetHours = 3.7;    // true midpoint trails DLMO by this
constexpr double kThreshold = 5.0;         // pg/mL
constexpr int kMinutesPerDay = 24 * 60;

void validate(const CohortSpec& s) {
    auto fail = [](const std::string& field, const std::string& why) {
        throw SpecError("cohort spec field '" + field + "' " + why);
    };
    if (s.n_participants < 1) fail("n_participants", "must be >= 1");
    if (s.days_per_participant < 10) fail("days_per_participant", "must be >= 10");
    if (s.phase_drift_sd < 0.0) fail("phase_drift_sd", "must be >= 0");
    if (s.sleep_noise_sd < 0.0) fail("sleep_noise_sd", "must be >= 0");
    if (s.evening_light_var < 0.0) fail("evening_light_var", "must be >= 0");
    if (s.le_noise_sd < 0.0) fail("le_noise_sd", "must be >= 0");
    if (s.st_noise_sd < 0.0) fail("st_noise_sd", "must be >= 0");
    if (s.ac_noise_sd < 0.0) fail("ac_noise_sd", "must be >= 0");
    if (s.gap_rate_per_day < 0.0) fail("gap_rate_per_day", "must be >= 0");
    if (s.gap_mean_hours <= 0.0) fail("gap_mean_hours", "must be > 0");
    if (s.long_gap_prob < 0.0 || s.long_gap_prob > 1.0) fail("long_gap_prob", "must be in [0, 1]");
    if (!(s.melatonin.baseline < kThreshold))
        fail("melatonin_baseline", "must stay below the 5 pg/mL threshold");
    if (!(s.melatonin.peak > kThreshold)) fail("melatonin_peak", "must exceed 5 pg/mL");
    if (s.melatonin.rise_scale_hours <= 0.0) fail("melatonin_rise_hours", "must be > 0");
    if (s.train_fraction < 0.0 || s.train_fraction > 1.0) fail("train_fraction", "must be in [0, 1]");
}

std::string participant_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%03d", i);
    return buf;
}

// Per-day quantities for one participant.
struct DayState {
    double latent = 0.0;        // slow-walk phase
    double evening_dev = 0.0;   // e_d, evening-light deviation
    double true_dlmo = 0.0;     // latent + coupling * e_d
    double true_midpoint = 0.0; // latent + fixed offset
};

// Missingness mask per channel: true = present.
std::vector<bool> gap_mask(const CohortSpec& spec, Rng rng, int total_minutes) {
    std::vector<bool> present(static_cast<std::size_t>(total_minutes), true);
    if (spec.gap_rate_per_day <= 0.0) return present;
    const double mean_cycle_h = 24.0 / spec.gap_rate_per_day;
    const double mean_present_h = std::max(1.0, mean_cycle_h - spec.gap_mean_hours);
    auto exp_minutes = [&rng](double mean_hours) {
        double u = 1.0 - rng.uniform01();
        return std::max<std::int64_t>(1, std::llround(-mean_hours * std::log(u) * 60.0));
    };
    std::int64_t m = exp_minutes(mean_present_h);  // start mid-presence
    bool in_gap = false;
    while (m < total_minutes) {
        if (in_gap) {
            const double mean = rng.uniform01() < spec.long_gap_prob ? 18.0 : spec.gap_mean_hours;
            std::int64_t len = exp_minutes(mean);
            for (std::int64_t i = m; i < std::min<std::int64_t>(m + len, total_minutes); ++i)
                present[static_cast<std::size_t>(i)] = false;
            m += len;
        } else {
            m += exp_minutes(mean_present_h);
        }
        in_gap = !in_gap;
    }
    return present;
}

}  // namespace

const GroundTruthRow* GroundTruth::find(const std::string& participant, int day_index) const {
    for (const auto& r : rows)
        if (r.day_index == day_index && r.participant == participant) return &r;
    return nullptr;
}

MelatoninProfile make_melatonin_profile(const std::string& participant, const Date& day,
                                        double true_dlmo, const MelatoninShape& shape,
                                        double start_rel, double end_rel, double step_hours) {
    const double q = (kThreshold - shape.baseline) / (shape.peak - shape.baseline);
    // Center the logistic so the curve crosses the threshold at true_dlmo.
    const double center = true_dlmo - shape.rise_scale_hours * std::log(q / (1.0 - q));

    MelatoninProfile prof;
    prof.participant = participant;
    prof.collection_day = day;
    for (double t = start_rel; t <= end_rel + 1e-9; t += step_hours) {
        const double x = (t - center) / shape.rise_scale_hours;
        const double conc = shape.baseline +
                            (shape.peak - shape.baseline) / (1.0 + std::exp(-x));
        prof.samples.push_back({csv::quantize_g9(t), csv::quantize_g9(conc)});
    }
    return prof;
}

std::pair<Dataset, GroundTruth> generate_cohort(const CohortSpec& spec) {
    validate(spec);
    Rng root(spec.seed);
    Dataset ds;
    GroundTruth gt;

    const int days = spec.days_per_participant;
    const int total_minutes = days * kMinutesPerDay;
    const int n_train = static_cast<int>(
        std::ceil(spec.train_fraction * static_cast<double>(spec.n_participants) - 1e-9));

    for (int pi = 0; pi < spec.n_participants; ++pi) {
        const std::string pid = participant_id(pi);
        Rng prng = root.substream(0x100 + static_cast<std::uint64_t>(pi));

        ParticipantRecord rec;
        rec.id = pid;
        rec.anchor = kAnchor;
        rec.split = pi < n_train ? SplitTag::train : SplitTag::test;

        // Latent phase: per-day random walk with evening-light coupling,
        // quantized to the minute grid so sleep clock times stay exact.
        Rng walk_rng = prng.substream(1);
        std::vector<DayState> day_state(static_cast<std::size_t>(days));
        double walk = std::clamp(walk_rng.normal(23.5, 1.0), 20.0, 27.0);
        for (int d = 0; d < days; ++d) {
            DayState& st = day_state[static_cast<std::size_t>(d)];
            const double quantized = std::round(walk * 60.0) / 60.0;
            st.latent = csv::quantize_g9(quantized);
            st.evening_dev = walk_rng.normal();
            st.true_dlmo = csv::quantize_g9(st.latent + spec.light_coupling * st.evening_dev);
            st.true_midpoint = csv::quantize_g9(st.latent + kMidOffsetHours);
            walk = std::clamp(walk + walk_rng.normal(0.0, spec.phase_drift_sd) +
                                  spec.light_coupling * st.evening_dev,
                              16.0, 32.0);
        }

        // Sleep records for nights 0 .. days-2; times on the minute grid.
        Rng sleep_rng = prng.substream(2);
        for (int d = 0; d + 1 < days; ++d) {
            const DayState& st = day_state[static_cast<std::size_t>(d)];
            const double mid_rel =
                st.latent + kMidOffsetHours + sleep_rng.normal(0.0, spec.sleep_noise_sd);
            const std::int64_t mid_min = std::llround(mid_rel * 60.0);
            const double duration_h = std::clamp(sleep_rng.normal(8.0, 0.25), 6.5, 9.5);
            const std::int64_t half_dur_min = std::llround(duration_h * 30.0);
            const std::int64_t onset_min = mid_min - half_dur_min;
            const std::int64_t offset_min = mid_min + half_dur_min;
            auto clock_hours = [](std::int64_t rel_min) {
                const std::int64_t cm = ((rel_min % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay;
                return static_cast<double>(cm / 60) + static_cast<double>(cm % 60) / 60.0;
            };
            rec.sleep.push_back(
                make_sleep_record(pid, d, clock_hours(onset_min), clock_hours(offset_min)));
        }

        // Label days and melatonin profiles.
        const int first_label = spec.labels == LabelMode::every_day ? 8 : days - 2;
        for (int d = first_label; d <= days - 2; ++d) {
            const DayState& st = day_state[static_cast<std::size_t>(d)];
            DlmoLabel label;
            label.participant = pid;
            label.collection_day = date_from_day_number(day_number(kAnchor) + d);
            label.phi = st.true_dlmo;
            rec.labels.push_back(label);
            rec.melatonin.push_back(make_melatonin_profile(pid, label.collection_day,
                                                           st.true_dlmo, spec.melatonin));
        }

        // Minute-level sensor streams.
        if (spec.generate_sensors) {
            std::vector<std::pair<std::int64_t, std::int64_t>> asleep;  // [onset, offset) minutes
            for (const auto& sr : rec.sleep)
                asleep.emplace_back(floor_to_minute(sr.onset), floor_to_minute(sr.offset));
            auto is_asleep = [&asleep](std::int64_t m) {
                for (const auto& [a, b] : asleep)
                    if (m >= a && m < b) return true;
                return false;
            };

            for (Channel chan : {Channel::LE, Channel::ST, Channel::AC}) {
                Rng crng = prng.substream(0x10 + static_cast<std::uint64_t>(chan));
                std::vector<bool> present = gap_mask(spec, prng.substream(0x20 + static_cast<std::uint64_t>(chan)),
                                                     total_minutes);
                std::vector<RawSample> raw;
                raw.reserve(static_cast<std::size_t>(total_minutes));
                for (std::int64_t m = 0; m < total_minutes; ++m) {
                    const bool sleeping = is_asleep(m);
                    const double clock = static_cast<double>(m % kMinutesPerDay) / 60.0;
                    const int d = static_cast<int>(m / kMinutesPerDay);
                    const double e_d = day_state[static_cast<std::size_t>(d)].evening_dev;
                    const double noise = crng.normal();
                    double v = 0.0;
                    switch (chan) {
                        case Channel::LE: {
                            if (sleeping) break;  // dark bedroom
                            const double bell =
                                850.0 * std::exp(-(clock - 13.5) * (clock - 13.5) / (2.0 * 3.2 * 3.2));
                            const double evening =
                                (clock >= 17.5 && clock < 23.5)
                                    ? std::max(10.0, 180.0 * (1.0 + spec.evening_light_var * e_d))
                                    : 0.0;
                            v = std::max(0.0, bell + evening + spec.le_noise_sd * noise);
                            break;
                        }
                        case Channel::ST:
                            v = (sleeping ? 35.3 : 33.1) + spec.st_noise_sd * noise;
                            break;
                        case Channel::AC:
                            v = sleeping ? std::max(0.0, 0.02 + spec.ac_noise_sd * noise)
                                         : std::max(0.0, 0.3 + 3.0 * spec.ac_noise_sd * noise);
                            break;
                    }
                    if (present[static_cast<std::size_t>(m)])
                        raw.push_back({m, csv::quantize_g9(v)});
                }
                rec.series[chan] = downsample_to_minute(chan, raw);
            }

            // Make sure every label day keeps at least one present sample.
            for (const auto& label : rec.labels) {
                const int d = rec.day_index_of(label.collection_day);
                const std::int64_t lo = static_cast<std::int64_t>(d) * kMinutesPerDay;
                bool covered = false;
                for (const auto& [chan, series] : rec.series) {
                    (void)chan;
                    for (std::int64_t m = lo; m < lo + kMinutesPerDay && !covered; ++m)
                        covered = series.at_minute(m).has_value();
                }
                if (!covered) {
                    MinuteSeries& le = rec.series[Channel::LE];
                    if (lo >= le.start_min && lo < le.end_min())
                        le.values[static_cast<std::size_t>(lo - le.start_min)] = 0.0;
                }
            }
        }

        for (int d = 0; d < days; ++d) {
            const DayState& st = day_state[static_cast<std::size_t>(d)];
            gt.rows.push_back({pid, d, st.latent, st.true_midpoint, st.true_dlmo});
        }
        ds.participants.push_back(std::move(rec));
    }
    return {std::move(ds), std::move(gt)};
}

void write_dataset(const Dataset& ds, const GroundTruth& gt, const fs::path& root) {
    fs::create_directories(root);

    {
        csv::Writer w(root / "sensors.csv");
        w.row({"participant_id", "date", "time", "dst_active", "channel", "value"});
        char timebuf[16];
        for (const auto& rec : ds.participants) {
            const std::int64_t anchor_day = day_number(rec.anchor);
            for (const auto& [chan, series] : rec.series) {
                for (std::int64_t m = series.start_min; m < series.end_min(); ++m) {
                    auto v = series.at_minute(m);
                    if (!v) continue;
                    const std::int64_t day = m >= 0 ? m / kMinutesPerDay
                                                    : -((-m + kMinutesPerDay - 1) / kMinutesPerDay);
                    const int cm = static_cast<int>(m - day * kMinutesPerDay);
                    std::snprintf(timebuf, sizeof timebuf, "%02d:%02d", cm / 60, cm % 60);
                    w.row({rec.id, format_date(date_from_day_number(anchor_day + day)), timebuf,
                           "0", channel_name(chan), csv::format_g9(*v)});
                }
            }
        }
        w.close();
    }

    {
        csv::Writer w(root / "sleep.csv");
        w.row({"participant_id", "day_index", "onset_clock", "offset_clock", "dst_active"});
        char buf[16];
        auto clock_field = [&buf](double hours) {
            const int cm = static_cast<int>(std::llround(clock_of_day(hours) * 60.0)) % kMinutesPerDay;
            std::snprintf(buf, sizeof buf, "%02d:%02d", cm / 60, cm % 60);
            return std::string(buf);
        };
        for (const auto& rec : ds.participants)
            for (const auto& sr : rec.sleep)
                w.row({rec.id, std::to_string(sr.day_index), clock_field(sr.onset),
                       clock_field(sr.offset), "0"});
        w.close();
    }

    {
        std::vector<DlmoLabel> labels;
        for (const auto& rec : ds.participants)
            labels.insert(labels.end(), rec.labels.begin(), rec.labels.end());
        write_labels_csv(root / "labels.csv", labels);
    }

    {
        csv::Writer w(root / "melatonin.csv");
        w.row({"participant_id", "sample_clock", "dst_active", "concentration_pg_ml"});
        char buf[32];
        for (const auto& rec : ds.participants) {
            for (const auto& prof : rec.melatonin) {
                const std::int64_t day0 = day_number(prof.collection_day);
                for (const auto& s : prof.samples) {
                    const std::int64_t total_min = std::llround(s.time * 60.0);
                    const std::int64_t day = total_min / kMinutesPerDay;
                    const int cm = static_cast<int>(total_min % kMinutesPerDay);
                    std::snprintf(buf, sizeof buf, "%s %02d:%02d",
                                  format_date(date_from_day_number(day0 + day)).c_str(), cm / 60,
                                  cm % 60);
                    w.row({rec.id, buf, "0", csv::format_g9(s.concentration)});
                }
            }
        }
        w.close();
    }

    if (std::any_of(ds.participants.begin(), ds.participants.end(),
                    [](const ParticipantRecord& r) { return r.split != SplitTag::unsplit; })) {
        csv::Writer w(root / "splits.csv");
        w.row({"participant_id", "split"});
        for (const auto& rec : ds.participants)
            if (rec.split != SplitTag::unsplit)
                w.row({rec.id, rec.split == SplitTag::train ? "train" : "test"});
        w.close();
    }

    {
        csv::Writer w(root / "ground_truth.csv");
        w.row({"participant_id", "day_index", "latent_phase_hours", "true_midpoint_hours",
               "true_dlmo_hours"});
        for (const auto& r : gt.rows)
            w.row({r.participant, std::to_string(r.day_index), csv::format_g9(r.latent_phase),
                   csv::format_g9(r.true_midpoint), csv::format_g9(r.true_dlmo)});
        w.close();
    }
}

CohortSpec parse_spec_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open spec file " + path.string());
    CohortSpec spec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto trim = [](std::string s) {
            const char* ws = " \t\r";
            const std::size_t a = s.find_first_not_of(ws);
            if (a == std::string::npos) return std::string();
            const std::size_t b = s.find_last_not_of(ws);
            return s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecError("spec file " + path.string() + ":" + std::to_string(lineno) +
                            ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto as_double = [&](const std::string& v) {
            try {
                return csv::parse_double(v, path, lineno);
            } catch (const ParseError&) {
                throw SpecError("spec field '" + key + "' has malformed value '" + v + "'");
            }
        };
        if (key == "n_participants") spec.n_participants = static_cast<int>(as_double(value));
        else if (key == "days_per_participant") spec.days_per_participant = static_cast<int>(as_double(value));
        else if (key == "phase_drift_sd") spec.phase_drift_sd = as_double(value);
        else if (key == "sleep_noise_sd") spec.sleep_noise_sd = as_double(value);
        else if (key == "light_coupling") spec.light_coupling = as_double(value);
        else if (key == "evening_light_var") spec.evening_light_var = as_double(value);
        else if (key == "le_noise_sd") spec.le_noise_sd = as_double(value);
        else if (key == "st_noise_sd") spec.st_noise_sd = as_double(value);
        else if (key == "ac_noise_sd") spec.ac_noise_sd = as_double(value);
        else if (key == "gap_rate_per_day") spec.gap_rate_per_day = as_double(value);
        else if (key == "gap_mean_hours") spec.gap_mean_hours = as_double(value);
        else if (key == "long_gap_prob") spec.long_gap_prob = as_double(value);
        else if (key == "melatonin_baseline") spec.melatonin.baseline = as_double(value);
        else if (key == "melatonin_peak") spec.melatonin.peak = as_double(value);
        else if (key == "melatonin_rise_hours") spec.melatonin.rise_scale_hours = as_double(value);
        else if (key == "train_fraction") spec.train_fraction = as_double(value);
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(as_double(value));
        else if (key == "labels") {
            if (value == "last") spec.labels = LabelMode::last_day;
            else if (value == "all") spec.labels = LabelMode::every_day;
            else throw SpecError("spec field 'labels' must be last|all, got '" + value + "'");
        } else {
            throw SpecError("unknown spec field '" + key + "'");
        }
    }
    return spec;
}

}  // namespace dlmo
