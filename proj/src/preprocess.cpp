#include "dlmo/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "dlmo/errors.hpp"

namespace dlmo {

int DayWindow::channel_column(Channel c) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i] == c) return static_cast<int>(i);
    return -1;
}

double log_transform_le(double lux) {
    if (lux < 0.0)
        throw DomainError("lux must be >= 0, got " + std::to_string(lux));
    return std::log10(lux + 1.0);
}

HourlySeries hourly_bin(const MinuteSeries& ms) {
    HourlySeries out;
    out.channel = ms.channel;
    if (ms.values.empty()) return out;

    auto floor_div = [](std::int64_t a, std::int64_t b) {
        return a >= 0 ? a / b : -((-a + b - 1) / b);
    };
    const std::int64_t first_hour = floor_div(ms.start_min, 60);
    const std::int64_t last_hour = floor_div(ms.end_min() - 1, 60);
    out.start_hour = first_hour;
    out.values.assign(static_cast<std::size_t>(last_hour - first_hour + 1), std::nullopt);

    for (std::int64_t h = first_hour; h <= last_hour; ++h) {
        double sum = 0.0;
        int count = 0;
        for (std::int64_t m = h * 60; m < (h + 1) * 60; ++m) {
            auto v = ms.at_minute(m);
            if (v) {
                sum += *v;
                ++count;
            }
        }
        if (count > 0) out.values[static_cast<std::size_t>(h - first_hour)] = sum / count;
    }
    return out;
}

namespace {

struct Run {
    std::size_t begin;  // first missing index
    std::size_t len;
    bool left_bounded;
    bool right_bounded;
};

template <typename T>
std::vector<Run> missing_runs(const std::vector<std::optional<T>>& v) {
    std::vector<Run> runs;
    std::size_t i = 0;
    while (i < v.size()) {
        if (v[i].has_value()) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < v.size() && !v[j].has_value()) ++j;
        runs.push_back({i, j - i, i > 0, j < v.size()});
        i = j;
    }
    return runs;
}

void fill_linear(std::vector<std::optional<double>>& v, const Run& run) {
    const double lo = *v[run.begin - 1];
    const double hi = *v[run.begin + run.len];
    const double step = (hi - lo) / static_cast<double>(run.len + 1);
    for (std::size_t j = 0; j < run.len; ++j)
        v[run.begin + j] = lo + step * static_cast<double>(j + 1);
}

}  // namespace

HourlySeries impute_gaps(HourlySeries hs, int max_gap_hours) {
    for (const Run& run : missing_runs(hs.values)) {
        if (!run.left_bounded || !run.right_bounded) continue;
        if (run.len > static_cast<std::size_t>(max_gap_hours)) continue;
        fill_linear(hs.values, run);
    }
    return hs;
}

DayWindow assemble_day_window(const ParticipantRecord& rec, const Date& label_day,
                              const std::vector<Channel>& channels, int max_gap_hours) {
    if (channels.empty()) throw ConfigError("day window needs at least one channel");
    const int label_idx = rec.day_index_of(label_day);
    const SleepRecord* waking = rec.find_sleep(label_idx - 1);
    if (!waking)
        throw MissingSleepRecord("participant " + rec.id + ": no sleep record ending on day " +
                                 std::to_string(label_idx) + " (" + format_date(label_day) + ")");

    const std::int64_t wake_min = floor_to_minute(waking->offset);

    DayWindow win;
    win.participant = rec.id;
    win.wake_time = static_cast<double>(wake_min) / 60.0;
    win.channels = channels;
    win.features = Mat(24, channels.size());

    for (std::size_t f = 0; f < channels.size(); ++f) {
        const Channel chan = channels[f];
        auto sit = rec.series.find(chan);
        if (sit == rec.series.end())
            throw ValidationError("participant " + rec.id + " has no " +
                                  std::string(channel_name(chan)) + " data");
        const MinuteSeries& ms = sit->second;

        // Wake-relative hourly bins over [wake, wake + 24 h).
        std::vector<std::optional<double>> bins(24, std::nullopt);
        for (int h = 0; h < 24; ++h) {
            double sum = 0.0;
            int count = 0;
            for (std::int64_t m = wake_min + 60 * h; m < wake_min + 60 * (h + 1); ++m) {
                auto v = ms.at_minute(m);
                if (!v) continue;
                sum += chan == Channel::LE ? log_transform_le(*v) : *v;
                ++count;
            }
            if (count > 0) bins[static_cast<std::size_t>(h)] = sum / count;
        }

        for (const Run& run : missing_runs(bins))
            if (run.len > static_cast<std::size_t>(max_gap_hours))
                throw ExcessiveGap(channel_name(chan), static_cast<int>(run.len));

        for (const Run& run : missing_runs(bins)) {
            if (run.left_bounded && run.right_bounded) {
                fill_linear(bins, run);
            } else if (run.right_bounded) {  // window-leading gap
                for (std::size_t j = 0; j < run.len; ++j)
                    bins[run.begin + j] = *bins[run.begin + run.len];
            } else {  // window-trailing gap
                for (std::size_t j = 0; j < run.len; ++j)
                    bins[run.begin + j] = *bins[run.begin - 1];
            }
        }

        for (int h = 0; h < 24; ++h)
            win.features(static_cast<std::size_t>(h), f) = *bins[static_cast<std::size_t>(h)];
    }
    return win;
}

MidpointWindow assemble_midpoint_window(const ParticipantRecord& rec, const Date& label_day,
                                        int n) {
    if (n < 1) throw ConfigError("midpoint window size must be >= 1");
    const int label_idx = rec.day_index_of(label_day);

    MidpointWindow win;
    win.participant = rec.id;
    int available = 0;
    for (int d = label_idx - n; d < label_idx; ++d)
        if (rec.find_sleep(d)) ++available;
    if (available < n) throw InsufficientHistory(available, n);

    for (int d = label_idx - n; d < label_idx; ++d)
        win.midpoints.push_back(rec.find_sleep(d)->midpoint_day_relative());
    return win;
}

std::vector<Channel> canonical_channels(const std::vector<Channel>& subset) {
    std::vector<Channel> out;
    for (Channel c : {Channel::LE, Channel::ST, Channel::AC})
        if (std::find(subset.begin(), subset.end(), c) != subset.end()) out.push_back(c);
    return out;
}

std::vector<Channel> parse_channel_list(const std::string& csv_list) {
    std::vector<Channel> out;
    std::size_t start = 0;
    while (start <= csv_list.size()) {
        std::size_t comma = csv_list.find(',', start);
        std::string tok = csv_list.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        std::string upper;
        for (char c : tok)
            if (c != ' ') upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        if (!upper.empty()) {
            try {
                out.push_back(channel_from_name(upper));
            } catch (const ValidationError&) {
                throw ConfigError("unknown channel '" + tok + "' (expected le, st, ac)");
            }
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("channel list is empty");
    return canonical_channels(out);
}

}  // namespace dlmo
