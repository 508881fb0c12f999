#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "od/reference.hpp"
#include "od/rng.hpp"
#include "od/timetable.hpp"

using namespace od;

namespace {

DirectPathSet chain(int n) {
    std::vector<Line> lines = {{"L", {}}};
    for (int i = 0; i < n; ++i) lines[0].stations.push_back(i);
    return build_direct_paths(lines, n);
}

} // namespace

TEST_CASE("interpolated order-statistic quantile") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    CHECK(quantile_sorted(x, 0.0) == 1.0);
    CHECK(quantile_sorted(x, 1.0) == 4.0);
    CHECK(quantile_sorted(x, 0.5) == doctest::Approx(2.5));
    CHECK(quantile_sorted(x, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("constant samples give their value") {
    const DirectPathSet d = chain(2);
    std::vector<TravelTimeSample> samples;
    for (int k = 0; k < 4; ++k) samples.push_back({0, 1, "L", 10.0});
    const TravelTimeMatrix t = estimate_direct_times(samples, d, 2);
    CHECK(t.has(0, 1));
    CHECK(t.minutes(0, 1) == doctest::Approx(10.0));
    CHECK_FALSE(t.has(1, 0)); // no samples in the other direction
}

TEST_CASE("fastest line wins for shared pairs") {
    std::vector<Line> lines = {{"A", {0, 1}}, {"B", {0, 1}}};
    const DirectPathSet d = build_direct_paths(lines, 2);
    std::vector<TravelTimeSample> samples = {{0, 1, "A", 12.0}, {0, 1, "B", 9.0}};
    const TravelTimeMatrix t = estimate_direct_times(samples, d, 2);
    CHECK(t.minutes(0, 1) == doctest::Approx(9.0));
}

TEST_CASE("quantile trimming drops the outlier") {
    // sorted 8,9,10,11,12,200: q05 = 8.25, q95 = 153 by linear interpolation,
    // surviving values 9,10,11,12 with mean 10.5
    const DirectPathSet d = chain(2);
    std::vector<TravelTimeSample> samples;
    for (double m : {8.0, 9.0, 10.0, 11.0, 12.0, 200.0}) samples.push_back({0, 1, "L", m});
    const TravelTimeMatrix t = estimate_direct_times(samples, d, 2);
    CHECK(t.minutes(0, 1) == doctest::Approx(10.5));
}

TEST_CASE("non-positive minutes are rejected, not fatal") {
    const DirectPathSet d = chain(2);
    std::vector<TravelTimeSample> samples = {{0, 1, "L", -3.0}, {0, 1, "L", 0.0},
                                             {0, 1, "L", 7.0}};
    TimetableStats stats;
    const TravelTimeMatrix t = estimate_direct_times(samples, d, 2, &stats);
    CHECK(stats.rejected_nonpositive == 2);
    CHECK(t.minutes(0, 1) == doctest::Approx(7.0));
}

TEST_CASE("sample on a non-direct pair is a structural error") {
    std::vector<Line> lines = {{"A", {0, 1}}, {"B", {2, 3}}};
    const DirectPathSet d = build_direct_paths(lines, 4);
    std::vector<TravelTimeSample> samples = {{0, 2, "A", 5.0}};
    CHECK_THROWS(estimate_direct_times(samples, d, 4));
}

TEST_CASE("unique transfer candidate") {
    std::vector<Line> lines = {{"A", {0, 1}}, {"B", {1, 2}}};
    const DirectPathSet d = build_direct_paths(lines, 3);
    TravelTimeMatrix t(3);
    auto set = [&](int i, int j, double m) {
        t.minutes(i, j) = m;
        t.defined.set(i, j, true);
    };
    set(0, 1, 10.0);
    set(1, 0, 10.0);
    set(1, 2, 20.0);
    set(2, 1, 20.0);
    const TransferTable kt = compute_transfers(t, d);
    CHECK(kt.at(0, 2) == 1);
    CHECK(t.has(0, 2));
    CHECK(t.minutes(0, 2) == doctest::Approx(30.0));
}

TEST_CASE("argmin picks the faster hub") {
    // hubs 1 (10+20) and 3 (12+15): station 3 wins with 27
    std::vector<Line> lines = {{"A", {0, 1}}, {"B", {1, 2}}, {"C", {0, 3}}, {"D", {3, 2}}};
    const DirectPathSet d = build_direct_paths(lines, 4);
    TravelTimeMatrix t(4);
    auto set = [&](int i, int j, double m) {
        t.minutes(i, j) = m;
        t.defined.set(i, j, true);
    };
    set(0, 1, 10.0);
    set(1, 2, 20.0);
    set(0, 3, 12.0);
    set(3, 2, 15.0);
    const TransferTable kt = compute_transfers(t, d);
    CHECK(kt.at(0, 2) == 3);
    CHECK(t.minutes(0, 2) == doctest::Approx(27.0));
}

TEST_CASE("transfer ties break to the lowest station id") {
    std::vector<Line> lines = {{"A", {0, 1}}, {"B", {1, 3}}, {"C", {0, 2}}, {"D", {2, 3}}};
    const DirectPathSet d = build_direct_paths(lines, 4);
    TravelTimeMatrix t(4);
    auto set = [&](int i, int j, double m) {
        t.minutes(i, j) = m;
        t.defined.set(i, j, true);
    };
    set(0, 1, 10.0);
    set(1, 3, 10.0);
    set(0, 2, 10.0);
    set(2, 3, 10.0);
    const TransferTable kt = compute_transfers(t, d);
    CHECK(kt.at(0, 3) == 1);
}

TEST_CASE("random topologies match the exhaustive reference scan") {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 5 + int(rng.below(8));
        DirectPathSet d(n);
        TravelTimeMatrix direct(n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (rng.uniform() < 0.35) {
                    d.insert(i, j);
                    d.insert(j, i);
                    direct.minutes(i, j) = 5.0 + 50.0 * rng.uniform();
                    direct.minutes(j, i) = 5.0 + 50.0 * rng.uniform();
                    direct.defined.set(i, j, true);
                    direct.defined.set(j, i, true);
                }
            }
        }
        TravelTimeMatrix augmented = direct;
        const TransferTable kt = compute_transfers(augmented, d);

        TransferTable ref_table(n);
        TravelTimeMatrix ref_aug(n);
        reference::transfer_scan(direct, d, ref_table, ref_aug);

        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                CHECK(kt.at(i, j) == ref_table.at(i, j));
                CHECK(augmented.defined(i, j) == ref_aug.defined(i, j));
                if (augmented.defined(i, j))
                    CHECK(augmented.minutes(i, j) == doctest::Approx(ref_aug.minutes(i, j)));

                // minimality over every admissible intermediate
                const StationId k_star = kt.at(i, j);
                if (k_star >= 0) {
                    const double best =
                        direct.minutes(i, k_star) + direct.minutes(k_star, j);
                    for (int k = 0; k < n; ++k) {
                        if (k == i || k == j) continue;
                        if (d.contains(i, k) && d.contains(k, j) && direct.defined(i, k) &&
                            direct.defined(k, j))
                            CHECK(best <= direct.minutes(i, k) + direct.minutes(k, j) + 1e-12);
                    }
                }

                // closure: defined = direct-with-samples or one-transfer
                if (i != j && !d.contains(i, j) && k_star < 0) CHECK_FALSE(augmented.defined(i, j));
            }
        }
    }
}

TEST_CASE("timetable loader derives all ordered stop pairs") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "od_tt_test";
    fs::create_directories(dir);
    StationRegistry reg;
    reg.add({"A", false, false, false});
    reg.add({"B", false, false, false});
    reg.add({"C", false, false, false});
    {
        std::ofstream out(dir / "timetable.csv");
        out << "ride_id,line_id,station,arrival_time,departure_time,date\n"
            << "r1,L,A,06:00:00,06:01:00,2022-06-06\n"
            << "r1,L,B,06:11:00,06:12:00,2022-06-06\n"
            << "r1,L,C,06:30:00,06:31:00,2022-06-06\n";
    }
    auto samples = load_timetable_samples((dir / "timetable.csv").string(), reg);
    REQUIRE(samples.size() == 3); // (A,B), (A,C), (B,C)
    double ab = 0, ac = 0, bc = 0;
    for (const auto& s : samples) {
        if (s.origin == 0 && s.dest == 1) ab = s.minutes;
        if (s.origin == 0 && s.dest == 2) ac = s.minutes;
        if (s.origin == 1 && s.dest == 2) bc = s.minutes;
    }
    CHECK(ab == doctest::Approx(10.0)); // 06:01 -> 06:11
    CHECK(ac == doctest::Approx(29.0));
    CHECK(bc == doctest::Approx(18.0));

    {
        std::ofstream out(dir / "bad.csv");
        out << "ride_id,line_id,station,arrival_time,departure_time,date\n"
            << "r1,L,A,06:00:00,06:01:00,2022-06-06\n"
            << "r1,M,B,06:11:00,06:12:00,2022-06-06\n";
    }
    CHECK_THROWS(load_timetable_samples((dir / "bad.csv").string(), reg));
}
