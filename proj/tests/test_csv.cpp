#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dlmo/csv.hpp"
#include "dlmo/errors.hpp"
#include "dlmo/rng.hpp"

using namespace dlmo;
namespace fs = std::filesystem;

namespace {
fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p, std::ios::trunc);
    out << content;
    return p;
}
}  // namespace

TEST_CASE("split_line keeps empty fields") {
    auto f = csv::split_line("a,,c,");
    REQUIRE(f.size() == 4);
    CHECK(f[0] == "a");
    CHECK(f[1].empty());
    CHECK(f[2] == "c");
    CHECK(f[3].empty());
}

TEST_CASE("read_file maps header columns and reports malformed rows") {
    auto p = write_temp("dlmo_csv_test.csv", "a,b\n1,2\n3,\n");
    csv::Table t = csv::read_file(p);
    CHECK(t.column("a") == 0);
    CHECK(t.column("b") == 1);
    REQUIRE(t.rows().size() == 2);
    CHECK(t.field(t.rows()[1], 1).empty());
    CHECK_THROWS_AS(t.column("missing"), ParseError);

    auto bad = write_temp("dlmo_csv_bad.csv", "a,b\n1,2,3\n");
    CHECK_THROWS_AS(csv::read_file(bad), ParseError);
}

TEST_CASE("parse_double rejects garbage with file and line") {
    auto p = fs::path("x.csv");
    CHECK(csv::parse_double("2.5e-3", p, 4) == doctest::Approx(0.0025));
    CHECK_THROWS_AS(csv::parse_double("", p, 4), ParseError);
    CHECK_THROWS_AS(csv::parse_double("1.2.3", p, 4), ParseError);
    CHECK_THROWS_AS(csv::parse_int("12x", p, 4), ParseError);
}

TEST_CASE("g9 formatting is a fixpoint after one quantization") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        double v = rng.normal(0.0, 100.0);
        double q = csv::quantize_g9(v);
        CHECK(csv::quantize_g9(q) == q);
        CHECK(csv::format_g9(q) == csv::format_g9(csv::quantize_g9(q)));
    }
}
