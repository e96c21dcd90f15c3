#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dlmo/errors.hpp"
#include "dlmo/ingest.hpp"
#include "dlmo/rng.hpp"

using namespace dlmo;
namespace fs = std::filesystem;

namespace {

struct FixtureDir {
    fs::path root;
    explicit FixtureDir(const std::string& name) {
        root = fs::temp_directory_path() / name;
        fs::remove_all(root);
        fs::create_directories(root);
    }
    void file(const std::string& name, const std::string& content) const {
        std::ofstream out(root / name, std::ios::trunc);
        out << content;
    }
};

// Two participants, a handful of minutes, one DST row.
void write_basic(const FixtureDir& d) {
    d.file("sensors.csv",
           "participant_id,date,time,dst_active,channel,value\n"
           "alice,2016-01-10,08:00,0,LE,120\n"
           "alice,2016-01-10,08:01,0,LE,\n"       // explicit missing
           "alice,2016-01-10,08:02,0,LE,130\n"
           "alice,2016-01-10,09:00,1,ST,33.5\n"   // DST: lands at 08:00
           "alice,2016-01-10,08:00,0,AC,0.25\n"
           "bob,2016-02-01,00:00,0,LE,5\n"
           "bob,2016-02-02,10:30,0,LE,7\n");
    d.file("sleep.csv",
           "participant_id,day_index,onset_clock,offset_clock,dst_active\n"
           "alice,0,23:00,07:00,0\n"
           "alice,1,00:30,08:00,0\n"              // onset past midnight
           "bob,0,22:00,06:00,0\n"
           "bob,1,23:15,07:45,1\n");              // DST night
    d.file("labels.csv",
           "participant_id,collection_date,dlmo_hours\n"
           "alice,2016-01-10,23.4\n");
    d.file("melatonin.csv",
           "participant_id,sample_clock,dst_active,concentration_pg_ml\n"
           "alice,2016-01-10 15:00,0,1.5\n"
           "alice,2016-01-10 20:00,0,4.5\n"
           "alice,2016-01-11 00:00,0,6.5\n");
    d.file("splits.csv",
           "participant_id,split\n"
           "alice,train\n"
           "bob,test\n");
}

}  // namespace

TEST_CASE("ac_l2_norm") {
    CHECK(ac_l2_norm(0, 0, 0) == 0.0);
    CHECK(ac_l2_norm(3, 4, 0) == doctest::Approx(5.0));
    CHECK(ac_l2_norm(1, 1, 1) == doctest::Approx(1.7320508075688772));

    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        double x = rng.normal(), y = rng.normal(), z = rng.normal();
        double n = ac_l2_norm(x, y, z);
        CHECK(ac_l2_norm(y, z, x) == doctest::Approx(n));
        CHECK(ac_l2_norm(-x, y, -z) == doctest::Approx(n));
    }
}

TEST_CASE("downsample_to_minute") {
    std::vector<RawSample> raw;
    for (int i = 0; i < 480; ++i) raw.push_back({100, 2.5});
    raw.push_back({102, 1.0});
    raw.push_back({102, 2.0});
    raw.push_back({102, 3.0});
    MinuteSeries ms = downsample_to_minute(Channel::AC, raw);
    CHECK(ms.start_min == 100);
    REQUIRE(ms.values.size() == 3);
    CHECK(*ms.at_minute(100) == doctest::Approx(2.5));
    CHECK_FALSE(ms.at_minute(101).has_value());
    CHECK(*ms.at_minute(102) == doctest::Approx(2.0));

    Rng rng(5);
    std::vector<RawSample> rnd;
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 100; ++i) {
        double v = rng.uniform(-3.0, 3.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        rnd.push_back({7, v});
    }
    MinuteSeries one = downsample_to_minute(Channel::ST, rnd);
    CHECK(*one.at_minute(7) >= lo);
    CHECK(*one.at_minute(7) <= hi);
}

TEST_CASE("load_dataset parses and validates the fixture") {
    FixtureDir d("dlmo_ingest_basic");
    write_basic(d);
    Dataset ds = load_dataset(d.root);
    REQUIRE(ds.participants.size() == 2);

    const ParticipantRecord* alice = ds.find("alice");
    REQUIRE(alice != nullptr);
    CHECK(alice->anchor == Date{2016, 1, 10});
    CHECK(alice->split == SplitTag::train);

    const MinuteSeries& le = alice->series.at(Channel::LE);
    CHECK(le.start_min == 8 * 60);
    CHECK(*le.at_minute(8 * 60) == doctest::Approx(120.0));
    CHECK_FALSE(le.at_minute(8 * 60 + 1).has_value());

    // The DST ST row at 09:00 normalizes to 08:00.
    const MinuteSeries& st = alice->series.at(Channel::ST);
    CHECK(st.start_min == 8 * 60);
    CHECK(*st.at_minute(8 * 60) == doctest::Approx(33.5));

    // Sleep unwrapping: 23:00-07:00 -> midpoint 27; 00:30 onset belongs to
    // the next calendar day.
    REQUIRE(alice->sleep.size() == 2);
    CHECK(alice->sleep[0].onset == doctest::Approx(23.0));
    CHECK(alice->sleep[0].offset == doctest::Approx(31.0));
    CHECK(alice->sleep[0].midpoint == doctest::Approx(27.0));
    CHECK(alice->sleep[0].midpoint_day_relative() == doctest::Approx(27.0));
    CHECK(alice->sleep[1].onset == doctest::Approx(24.0 + 24.5));
    CHECK(alice->sleep[1].offset == doctest::Approx(24.0 + 32.0));

    // Bob's DST night: 23:15 -> 22:15, 07:45 -> 06:45.
    const ParticipantRecord* bob = ds.find("bob");
    REQUIRE(bob != nullptr);
    CHECK(bob->split == SplitTag::test);
    CHECK(bob->sleep[1].onset == doctest::Approx(24.0 + 22.25));
    CHECK(bob->sleep[1].offset == doctest::Approx(24.0 + 30.75));

    REQUIRE(alice->labels.size() == 1);
    CHECK(alice->labels[0].phi == doctest::Approx(23.4));
    CHECK(alice->day_index_of(alice->labels[0].collection_day) == 0);

    // Melatonin profile: times relative to collection-day midnight.
    REQUIRE(alice->melatonin.size() == 1);
    const MelatoninProfile& prof = alice->melatonin[0];
    REQUIRE(prof.samples.size() == 3);
    CHECK(prof.samples[0].time == doctest::Approx(15.0));
    CHECK(prof.samples[1].time == doctest::Approx(20.0));
    CHECK(prof.samples[2].time == doctest::Approx(24.0));

    Dataset train = ds.subset(SplitTag::train);
    CHECK(train.participants.size() == 1);
    CHECK(train.split_tag == SplitTag::train);
}

TEST_CASE("load_dataset rejects invariant breaches") {
    {
        FixtureDir d("dlmo_ingest_neglux");
        write_basic(d);
        d.file("sensors.csv",
               "participant_id,date,time,dst_active,channel,value\n"
               "alice,2016-01-10,08:00,0,LE,-1\n");
        CHECK_THROWS_WITH_AS(load_dataset(d.root),
                             doctest::Contains("alice"), ValidationError);
    }
    {
        FixtureDir d("dlmo_ingest_dupsleep");
        write_basic(d);
        d.file("sleep.csv",
               "participant_id,day_index,onset_clock,offset_clock,dst_active\n"
               "alice,0,23:00,07:00,0\n"
               "alice,0,22:00,06:00,0\n");
        CHECK_THROWS_AS(load_dataset(d.root), ValidationError);
    }
    {
        FixtureDir d("dlmo_ingest_philow");
        write_basic(d);
        d.file("labels.csv",
               "participant_id,collection_date,dlmo_hours\nalice,2016-01-10,6.0\n");
        CHECK_THROWS_AS(load_dataset(d.root), ValidationError);
    }
    {
        FixtureDir d("dlmo_ingest_uncovered");
        write_basic(d);
        d.file("labels.csv",
               "participant_id,collection_date,dlmo_hours\nalice,2016-03-01,23.0\n");
        CHECK_THROWS_AS(load_dataset(d.root), ValidationError);
    }
    {
        FixtureDir d("dlmo_ingest_both");
        write_basic(d);
        d.file("sensors_raw.csv", "participant_id,date,time,dst_active,channel,value,ac_x,ac_y,ac_z\n");
        CHECK_THROWS_AS(load_dataset(d.root), ValidationError);
    }
    {
        FixtureDir d("dlmo_ingest_badrow");
        write_basic(d);
        d.file("sensors.csv",
               "participant_id,date,time,dst_active,channel,value\n"
               "alice,2016-01-10,08:00,0,LE,abc\n");
        CHECK_THROWS_AS(load_dataset(d.root), ParseError);
    }
}

TEST_CASE("sensors_raw.csv: 8 Hz AC rows are normed and averaged per minute") {
    FixtureDir d("dlmo_ingest_raw");
    d.file("sensors_raw.csv",
           "participant_id,date,time,dst_active,channel,value,ac_x,ac_y,ac_z\n"
           "carol,2016-01-10,08:00:00.000,0,AC,,3,4,0\n"
           "carol,2016-01-10,08:00:00.125,0,AC,,0,0,5\n"
           "carol,2016-01-10,08:00:00.250,0,AC,,,,\n"      // missing sample
           "carol,2016-01-10,08:00:30.500,0,ST,33.0,,,\n"
           "carol,2016-01-10,08:00:45.500,0,ST,34.0,,,\n");
    d.file("sleep.csv", "participant_id,day_index,onset_clock,offset_clock,dst_active\n");
    Dataset ds = load_dataset(d.root);
    const ParticipantRecord* carol = ds.find("carol");
    REQUIRE(carol != nullptr);
    CHECK(*carol->series.at(Channel::AC).at_minute(480) == doctest::Approx(5.0));
    CHECK(*carol->series.at(Channel::ST).at_minute(480) == doctest::Approx(33.5));
}

TEST_CASE("make_sleep_record rejects day-long intervals") {
    CHECK_THROWS_AS(make_sleep_record("x", 0, 12.0, 12.0), ValidationError);
    SleepRecord r = make_sleep_record("x", 3, 22.0, 6.0);
    CHECK(r.onset == doctest::Approx(72.0 + 22.0));
    CHECK(r.offset == doctest::Approx(72.0 + 30.0));
}
