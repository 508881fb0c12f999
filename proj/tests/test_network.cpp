#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "od/network.hpp"
#include "od/rng.hpp"

using namespace od;

TEST_CASE("direct paths from two overlapping lines") {
    std::vector<Line> lines = {{"L1", {0, 1}}, {"L2", {1, 2}}};
    const DirectPathSet d = build_direct_paths(lines, 3);
    CHECK(d.contains(0, 1));
    CHECK(d.contains(1, 0));
    CHECK(d.contains(1, 2));
    CHECK(d.contains(2, 1));
    CHECK_FALSE(d.contains(0, 2));
    CHECK_FALSE(d.contains(2, 0));
    CHECK(d.count() == 4);
}

TEST_CASE("single line connects all its pairs") {
    std::vector<Line> lines = {{"L1", {0, 1, 2}}};
    const DirectPathSet d = build_direct_paths(lines, 3);
    CHECK(d.count() == 6);
}

TEST_CASE("no lines, no direct paths") {
    const DirectPathSet d = build_direct_paths({}, 4);
    CHECK(d.count() == 0);
}

TEST_CASE("line referencing an unknown station is a topology error") {
    std::vector<Line> lines = {{"L1", {0, 5}}};
    CHECK_THROWS(build_direct_paths(lines, 3));
}

TEST_CASE("direct path relation is symmetric and irreflexive on random topologies") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + int(rng.below(10));
        const int n_lines = 1 + int(rng.below(4));
        std::vector<Line> lines;
        for (int l = 0; l < n_lines; ++l) {
            Line line;
            line.line_id = "L" + std::to_string(l);
            for (int s = 0; s < n; ++s)
                if (rng.uniform() < 0.5) line.stations.push_back(s);
            if (line.stations.size() < 2) continue;
            lines.push_back(line);
        }
        const DirectPathSet d = build_direct_paths(lines, n);
        for (int i = 0; i < n; ++i) {
            CHECK_FALSE(d.contains(i, i));
            for (int j = 0; j < n; ++j) CHECK(d.contains(i, j) == d.contains(j, i));
        }
    }
}

TEST_CASE("week bucketing is Monday-anchored") {
    const WeekCalendar cal(parse_date("2022-06-06"), 29);
    CHECK(cal.week_of(parse_date("2022-06-06")) == 0);
    CHECK(cal.week_of(parse_date("2022-06-12")) == 0); // Sunday of the same span
    CHECK(cal.week_of(parse_date("2022-06-13")) == 1);
    CHECK_FALSE(cal.week_of(parse_date("2022-06-05")).has_value());
    CHECK_FALSE(cal.week_of(parse_date("2023-01-02")).has_value());

    // every day in range maps to exactly one week
    for (int d = 0; d < 29 * 7; ++d) {
        const auto w = cal.week_of(cal.first_monday + std::chrono::days(d));
        REQUIRE(w.has_value());
        CHECK(*w == d / 7);
    }
}

TEST_CASE("calendar start must be a Monday") {
    CHECK_THROWS(WeekCalendar(parse_date("2022-06-07"), 4));
}

TEST_CASE("registry rejects duplicates and inconsistent flags") {
    StationRegistry reg;
    reg.add({"Alpha", false, false, false});
    CHECK_THROWS(reg.add({"Alpha", false, false, false}));
    CHECK_THROWS(reg.add({"Beta", true, true, false}));
    CHECK(reg.require("Alpha") == 0);
    CHECK_THROWS(reg.require("Gamma"));
}

TEST_CASE("stations and lines files round-trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "od_net_test";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "stations.csv");
        out << "station_id,name,milan_internal,is_area,interregional\n"
            << "0,Alpha,0,0,0\n"
            << "1,Beta,1,0,0\n"
            << "2,Gamma,0,1,0\n";
    }
    {
        std::ofstream out(dir / "lines.csv");
        out << "line_id,station_sequence\nL1,Alpha|Beta|Gamma\n";
    }
    const StationRegistry reg = load_stations((dir / "stations.csv").string());
    CHECK(reg.size() == 3);
    CHECK(reg.at(1).milan_internal);
    CHECK(reg.at(2).is_area);
    const auto lines = load_lines((dir / "lines.csv").string(), reg);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].stations == std::vector<StationId>{0, 1, 2});

    {
        std::ofstream out(dir / "bad_lines.csv");
        out << "line_id,station_sequence\nL1,Alpha|Nowhere\n";
    }
    CHECK_THROWS_WITH_AS(load_lines((dir / "bad_lines.csv").string(), reg),
                         doctest::Contains("Nowhere"), std::runtime_error);
}
