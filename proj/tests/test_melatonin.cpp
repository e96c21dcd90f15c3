#include <doctest.h>

#include <cmath>

#include "dlmo/errors.hpp"
#include "dlmo/melatonin.hpp"
#include "dlmo/rng.hpp"

using namespace dlmo;

namespace {
MelatoninProfile profile(std::vector<std::pair<double, double>> pts) {
    MelatoninProfile p;
    p.participant = "t";
    p.collection_day = Date{2016, 1, 10};
    for (auto [t, c] : pts) p.samples.push_back({t, c});
    return p;
}
}  // namespace

TEST_CASE("extract_dlmo interpolates the first upward crossing") {
    CHECK(extract_dlmo(profile({{22.0, 3.0}, {23.0, 7.0}})).phi == doctest::Approx(22.5));
    CHECK(extract_dlmo(profile({{20.0, 1.0}, {21.0, 5.0}})).phi == 21.0);
}

TEST_CASE("extract_dlmo error cases") {
    CHECK_THROWS_AS(extract_dlmo(profile({{20.0, 1.0}, {21.0, 2.0}, {22.0, 4.9}})), NoOnset);
    CHECK_THROWS_AS(extract_dlmo(profile({{20.0, 5.0}, {21.0, 7.0}})), AlreadyAbove);
    CHECK_THROWS_AS(extract_dlmo(profile({{20.0, 1.0}})), TooFewSamples);
}

TEST_CASE("first crossing wins over later dips and re-crossings") {
    auto p = profile({{20.0, 1.0}, {21.0, 6.0}, {22.0, 4.0}, {23.0, 8.0}});
    CHECK(extract_dlmo(p).phi == doctest::Approx(20.8));
}

TEST_CASE("flat segment exactly at threshold returns its earliest time") {
    auto p = profile({{20.0, 2.0}, {21.0, 5.0}, {22.0, 5.0}, {23.0, 9.0}});
    CHECK(extract_dlmo(p).phi == 21.0);
}

TEST_CASE("interpolated concentration at the returned time equals the threshold") {
    Rng rng(12);
    for (int rep = 0; rep < 200; ++rep) {
        // Random increasing profile crossing 5 somewhere in the middle.
        std::vector<std::pair<double, double>> pts;
        double t = 15.0;
        double c = rng.uniform(0.1, 4.0);
        for (int i = 0; i < 12; ++i) {
            pts.push_back({t, c});
            t += rng.uniform(0.5, 1.5);
            c += rng.uniform(0.05, 2.0);
        }
        if (pts.back().second < 5.0) continue;
        auto p = profile(pts);
        double onset = extract_dlmo(p).phi;
        // Locate the bracketing pair and evaluate the chord at the onset.
        for (std::size_t k = 1; k < pts.size(); ++k) {
            if (onset <= pts[k].first + 1e-12 && onset >= pts[k - 1].first - 1e-12) {
                const double slope =
                    (pts[k].second - pts[k - 1].second) / (pts[k].first - pts[k - 1].first);
                const double at = pts[k - 1].second + slope * (onset - pts[k - 1].first);
                CHECK(at == doctest::Approx(5.0).epsilon(1e-12));
                break;
            }
        }
    }
}

TEST_CASE("raising the threshold never moves the onset earlier") {
    Rng rng(13);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<std::pair<double, double>> pts;
        double t = 15.0, c = rng.uniform(0.1, 2.0);
        for (int i = 0; i < 14; ++i) {
            pts.push_back({t, c});
            t += 1.0;
            c += rng.uniform(0.0, 1.8);
        }
        auto p = profile(pts);
        double lo_thresh = rng.uniform(2.5, 4.0);
        double hi_thresh = lo_thresh + rng.uniform(0.1, 2.0);
        if (pts.back().second <= hi_thresh || pts.front().second >= lo_thresh) continue;
        CHECK(extract_dlmo(p, hi_thresh).phi >= extract_dlmo(p, lo_thresh).phi - 1e-12);
    }
}
