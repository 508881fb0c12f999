#include <doctest.h>

#include <cmath>
#include <map>

#include "od/rng.hpp"
#include "od/ticketing.hpp"

using namespace od;

namespace {

TicketRecord make(StationId a, StationId b, TicketKind kind, const char* date, double qty,
                  bool shared = false) {
    return {a, b, kind, parse_date(date), qty, shared};
}

double total_mass(const std::vector<WeeklySeedOD>& seeds) {
    double s = 0.0;
    for (const WeeklySeedOD& w : seeds) s += w.x.sum();
    return s;
}

// independent route to the per-record trip total: walk the usage period day
// by day and apply the full/partial week rule per bucketed week, ignoring the
// study calendar entirely
double oracle_record_mass(const TicketRecord& rec) {
    using std::chrono::days;
    const double q = rec.quantity;
    switch (rec.kind) {
    case TicketKind::ordinary:
    case TicketKind::special_rate:
    case TicketKind::additional_exaction:
        return q * 1.0; // 0.5 per direction per unit
    case TicketKind::carnet:
        return q * 10.0; // 5 drawn days, one round trip each
    case TicketKind::weekly_sub:
        return q * 10.0; // 5 round trips
    case TicketKind::monthly_sub:
    case TicketKind::yearly_sub: {
        Date start, end;
        if (rec.kind == TicketKind::monthly_sub) {
            const std::chrono::year_month_day ymd{rec.purchase_date};
            if (unsigned(ymd.day()) < 22) {
                start = rec.purchase_date;
                end = last_of_month_after(rec.purchase_date, 0);
            } else {
                start = last_of_month_after(rec.purchase_date, 0) + days(1);
                end = last_of_month_after(rec.purchase_date, 1);
            }
        } else {
            start = rec.purchase_date;
            end = last_of_month_after(rec.purchase_date, 12);
        }
        std::map<Date, long> days_per_week;
        for (Date d = start; d <= end; d += days(1)) ++days_per_week[monday_of(d)];
        double trips = 0.0;
        for (const auto& [monday, n] : days_per_week)
            trips += (n == 7) ? 5.0 : double(std::llround(5.0 / 7.0 * double(n)));
        return q * 2.0 * trips;
    }
    case TicketKind::other:
        return 0.0;
    }
    return 0.0;
}

} // namespace

TEST_CASE("shared-fare ceiling") {
    CHECK(apply_shared_fare_ceiling(make(0, 1, TicketKind::ordinary, "2022-06-06", 2.5, true))
              .quantity == 3.0);
    CHECK(apply_shared_fare_ceiling(make(0, 1, TicketKind::ordinary, "2022-06-06", 4.0, true))
              .quantity == 4.0);
    CHECK(apply_shared_fare_ceiling(make(0, 1, TicketKind::ordinary, "2022-06-06", 0.5, true))
              .quantity == 1.0);
    CHECK_THROWS(apply_shared_fare_ceiling(make(0, 1, TicketKind::ordinary, "2022-06-06", 0.0)));
}

TEST_CASE("ordinary ticket splits half a trip per direction in one week") {
    const WeekCalendar cal(parse_date("2022-06-06"), 4);
    // bought the Sunday before week 0: every drawn offset 1..7 lands in week 0
    const std::vector<TicketRecord> records = {
        make(0, 1, TicketKind::ordinary, "2022-06-05", 1)};
    const auto seeds = convert_tickets(records, cal, 2, 99);
    CHECK(seeds[0].x(0, 1) == doctest::Approx(0.5));
    CHECK(seeds[0].x(1, 0) == doctest::Approx(0.5));
    for (int w = 1; w < 4; ++w) CHECK(seeds[size_t(w)].x.sum() == 0.0);
}

TEST_CASE("ordinary mass bought on a Monday spreads about 6/7 this week") {
    const WeekCalendar cal(parse_date("2022-06-06"), 4);
    const std::vector<TicketRecord> records = {
        make(0, 1, TicketKind::ordinary, "2022-06-06", 1000)};
    ConversionStats stats;
    const auto seeds = convert_tickets(records, cal, 2, 7, &stats);
    const double w0 = seeds[0].x.sum(), w1 = seeds[1].x.sum();
    CHECK(w0 + w1 == doctest::Approx(1000.0)); // offsets 1..7 never leave these two weeks
    CHECK(w0 / 1000.0 == doctest::Approx(6.0 / 7.0).epsilon(0.05));
    CHECK(w1 / 1000.0 == doctest::Approx(1.0 / 7.0).epsilon(0.35));

    // directions are split exactly evenly
    for (const auto& seed : seeds) CHECK(seed.x(0, 1) == doctest::Approx(seed.x(1, 0)));
}

TEST_CASE("carnet yields 5 round trips within 30 days") {
    const WeekCalendar cal(parse_date("2022-06-06"), 8);
    const std::vector<TicketRecord> records = {make(0, 1, TicketKind::carnet, "2022-06-06", 1)};
    ConversionStats stats;
    const auto seeds = convert_tickets(records, cal, 2, 5, &stats);
    CHECK(total_mass(seeds) == doctest::Approx(10.0));
    CHECK(stats.dropped_mass == 0.0);
    // no drawn day can contribute more than one round trip (days distinct)
    for (const auto& seed : seeds) {
        CHECK(seed.x(0, 1) == seed.x(1, 0));
        CHECK(seed.x(0, 1) <= 5.0);
    }
}

TEST_CASE("weekly subscription lands on the purchase or following week") {
    const WeekCalendar cal(parse_date("2022-06-06"), 4);
    // Wednesday: same week
    auto seeds = convert_tickets({make(0, 1, TicketKind::weekly_sub, "2022-06-08", 1)}, cal, 2, 1);
    CHECK(seeds[0].x(0, 1) == doctest::Approx(5.0));
    CHECK(seeds[0].x(1, 0) == doctest::Approx(5.0));
    // Thursday: following week
    seeds = convert_tickets({make(0, 1, TicketKind::weekly_sub, "2022-06-09", 1)}, cal, 2, 1);
    CHECK(seeds[0].x.sum() == 0.0);
    CHECK(seeds[1].x(0, 1) == doctest::Approx(5.0));
}

TEST_CASE("monthly subscription week-by-week attribution") {
    const WeekCalendar cal(parse_date("2022-06-06"), 8);
    // bought Wed 2022-06-08 (before the 22nd): usage June 8-30
    //   week of Jun 6: 5 days -> round(25/7) = 4 round trips
    //   weeks of Jun 13, Jun 20: full -> 5 each
    //   week of Jun 27: 4 days -> round(20/7) = 3
    const auto seeds =
        convert_tickets({make(0, 1, TicketKind::monthly_sub, "2022-06-08", 1)}, cal, 2, 1);
    CHECK(seeds[0].x(0, 1) == doctest::Approx(4.0));
    CHECK(seeds[1].x(0, 1) == doctest::Approx(5.0));
    CHECK(seeds[2].x(0, 1) == doctest::Approx(5.0));
    CHECK(seeds[3].x(0, 1) == doctest::Approx(3.0));
    CHECK(seeds[4].x.sum() == 0.0);

    // a 3-day partial week gets round(15/7) = 2 round trips
    const auto fri =
        convert_tickets({make(0, 1, TicketKind::monthly_sub, "2022-06-17", 1)}, cal, 2, 1);
    CHECK(fri[1].x(0, 1) == doctest::Approx(2.0)); // Jun 17-19 in the Jun 13 week
}

TEST_CASE("monthly bought on the 22nd shifts to the next month") {
    const WeekCalendar cal(parse_date("2022-06-06"), 10);
    const auto seeds =
        convert_tickets({make(0, 1, TicketKind::monthly_sub, "2022-06-22", 1)}, cal, 2, 1);
    // usage July 1-31; nothing before the week containing July 1
    CHECK(seeds[0].x.sum() == 0.0);
    CHECK(seeds[1].x.sum() == 0.0);
    CHECK(seeds[2].x.sum() == 0.0);
    CHECK(seeds[3].x(0, 1) == doctest::Approx(2.0)); // Jun 27 week holds July 1-3
    CHECK(seeds[4].x(0, 1) == doctest::Approx(5.0));
}

TEST_CASE("yearly subscription conserves mass between seeds and drops") {
    const WeekCalendar cal(parse_date("2022-06-06"), 4); // short calendar forces drops
    const TicketRecord rec = make(0, 1, TicketKind::yearly_sub, "2022-06-15", 1);
    ConversionStats stats;
    const auto seeds = convert_tickets({rec}, cal, 2, 1, &stats);
    CHECK(stats.dropped_attributions > 0);
    CHECK(total_mass(seeds) + stats.dropped_mass ==
          doctest::Approx(oracle_record_mass(rec)).epsilon(1e-12));
    // first in-calendar week: June 15-19 -> 4 round trips
    CHECK(seeds[1].x(0, 1) == doctest::Approx(4.0));
}

TEST_CASE("conversion conservation against the closed-form oracle") {
    const WeekCalendar cal(parse_date("2022-06-06"), 6);
    const std::vector<TicketRecord> records = {
        make(0, 1, TicketKind::ordinary, "2022-05-20", 17),
        make(1, 2, TicketKind::ordinary, "2022-06-30", 250),
        make(0, 2, TicketKind::special_rate, "2022-06-10", 3),
        make(2, 1, TicketKind::additional_exaction, "2022-07-01", 8),
        make(0, 1, TicketKind::carnet, "2022-06-12", 2),
        make(1, 0, TicketKind::weekly_sub, "2022-06-16", 4),
        make(0, 2, TicketKind::monthly_sub, "2022-06-03", 2),
        make(2, 0, TicketKind::monthly_sub, "2022-06-25", 1),
        make(1, 2, TicketKind::yearly_sub, "2022-06-20", 1),
        make(0, 1, TicketKind::other, "2022-06-08", 5),
    };
    ConversionStats stats;
    const auto seeds = convert_tickets(records, cal, 3, 2024, &stats);
    double expected = 0.0;
    for (const TicketRecord& rec : records) expected += oracle_record_mass(rec);
    const double engine_total = total_mass(seeds) + stats.dropped_mass;
    CHECK(engine_total == doctest::Approx(expected).epsilon(1e-9));
    CHECK(total_mass(seeds) == doctest::Approx(stats.converted_mass).epsilon(1e-9));
    CHECK(stats.excluded_records == 1);
}

TEST_CASE("conversion is deterministic and append-stable") {
    const WeekCalendar cal(parse_date("2022-06-06"), 6);
    const std::vector<TicketRecord> base = {
        make(0, 1, TicketKind::ordinary, "2022-06-07", 40),
        make(1, 2, TicketKind::carnet, "2022-06-10", 3),
    };
    const auto a = convert_tickets(base, cal, 3, 11);
    const auto b = convert_tickets(base, cal, 3, 11);
    for (size_t w = 0; w < a.size(); ++w)
        for (size_t k = 0; k < a[w].x.size(); ++k)
            CHECK(a[w].x.data()[k] == b[w].x.data()[k]); // bit-identical

    // appending a record that converts to nothing leaves earlier draws alone
    auto extended = base;
    extended.push_back(make(0, 2, TicketKind::other, "2022-06-08", 1));
    const auto c = convert_tickets(extended, cal, 3, 11);
    for (size_t w = 0; w < a.size(); ++w)
        for (size_t k = 0; k < a[w].x.size(); ++k)
            CHECK(a[w].x.data()[k] == c[w].x.data()[k]);

    const auto other_seed = convert_tickets(base, cal, 3, 12);
    bool any_differs = false;
    for (size_t w = 0; w < a.size(); ++w)
        for (size_t k = 0; k < a[w].x.size(); ++k)
            any_differs |= a[w].x.data()[k] != other_seed[w].x.data()[k];
    CHECK(any_differs);
}

TEST_CASE("threaded conversion is bit-identical to serial") {
    // every deposit is a half-trip multiple, so the merge order cannot change
    // the sums
    const WeekCalendar cal(parse_date("2022-06-06"), 8);
    Rng rng(63);
    std::vector<TicketRecord> records;
    for (int k = 0; k < 300; ++k) {
        const TicketKind kind = TicketKind(rng.below(7));
        records.push_back(make(StationId(rng.below(4)), StationId(4 + rng.below(3)), kind,
                               "2022-06-06", double(1 + rng.below(9))));
        records.back().purchase_date += std::chrono::days(rng.below(60));
    }
    const auto serial = convert_tickets(records, cal, 7, 9);
    const auto threaded = convert_tickets(records, cal, 7, 9, nullptr, 4);
    for (size_t w = 0; w < serial.size(); ++w)
        for (size_t k = 0; k < serial[w].x.size(); ++k)
            CHECK(serial[w].x.data()[k] == threaded[w].x.data()[k]);
}

TEST_CASE("conversion rejects same-station tickets") {
    const WeekCalendar cal(parse_date("2022-06-06"), 2);
    CHECK_THROWS(convert_tickets({make(1, 1, TicketKind::ordinary, "2022-06-06", 1)}, cal, 3, 1));
}

TEST_CASE("ticket kind summary shares") {
    std::vector<TicketRecord> records = {
        make(0, 1, TicketKind::ordinary, "2022-06-06", 2559799),
        make(0, 1, TicketKind::monthly_sub, "2022-06-06", 51076),
        make(0, 1, TicketKind::weekly_sub, "2022-06-06", 21106),
        make(0, 1, TicketKind::carnet, "2022-06-06", 2476),
        make(0, 1, TicketKind::yearly_sub, "2022-06-06", 194),
        make(0, 1, TicketKind::other, "2022-06-06", 41978),
    };
    const TicketSummary s = summarize_tickets(records);
    CHECK(s.total_purchases == 2676629);
    CHECK(s.shares_defined);
    CHECK(s.share[int(TicketKind::ordinary)] == doctest::Approx(95.6).epsilon(0.001));

    const TicketSummary solo = summarize_tickets({make(0, 1, TicketKind::carnet, "2022-06-06", 1)});
    CHECK(solo.share[int(TicketKind::carnet)] == doctest::Approx(100.0));

    const TicketSummary empty = summarize_tickets({});
    CHECK_FALSE(empty.shares_defined);
    CHECK(empty.total_purchases == 0);
}

TEST_CASE("transfer separation moves mass onto the legs") {
    std::vector<Line> lines = {{"A", {0, 1}}, {"B", {1, 2}}};
    const DirectPathSet d = build_direct_paths(lines, 3);
    TravelTimeMatrix t(3);
    auto set = [&](int i, int j, double m) {
        t.minutes(i, j) = m;
        t.defined.set(i, j, true);
    };
    set(0, 1, 10.0);
    set(1, 2, 10.0);
    const TransferTable kt = compute_transfers(t, d);

    WeeklySeedOD seed(0, 3);
    seed.x(0, 2) = 4.0;
    seed.x(0, 1) = 1.0;
    const double dropped = separate_transfers(seed, kt, d);
    CHECK(dropped == 0.0);
    CHECK(seed.x(0, 1) == doctest::Approx(5.0));
    CHECK(seed.x(1, 2) == doctest::Approx(4.0));
    CHECK(seed.x(0, 2) == 0.0);
}

TEST_CASE("all-direct seeds pass through unchanged") {
    std::vector<Line> lines = {{"A", {0, 1, 2}}};
    const DirectPathSet d = build_direct_paths(lines, 3);
    const TransferTable kt(3);
    WeeklySeedOD seed(0, 3);
    seed.x(0, 1) = 2.0;
    seed.x(2, 0) = 3.0;
    const WeeklySeedOD before = seed;
    CHECK(separate_transfers(seed, kt, d) == 0.0);
    for (size_t k = 0; k < seed.x.size(); ++k)
        CHECK(seed.x.data()[k] == before.x.data()[k]);
}

TEST_CASE("unreachable pairs drop their mass") {
    std::vector<Line> lines = {{"A", {0, 1}}, {"B", {2, 3}}};
    const DirectPathSet d = build_direct_paths(lines, 4);
    const TransferTable kt(4); // empty: no admissible transfers at all
    WeeklySeedOD seed(0, 4);
    seed.x(0, 3) = 3.0;
    CHECK(separate_transfers(seed, kt, d) == doctest::Approx(3.0));
    CHECK(seed.x(0, 3) == 0.0);

    // post-separation support: positive entries only on direct pairs
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (seed.x(i, j) > 0.0) CHECK(d.contains(i, j));
}

TEST_CASE("missing mask combinatorics") {
    SUBCASE("one interregional station among 46") {
        StationRegistry reg;
        for (int i = 0; i < 46; ++i) {
            Station st;
            st.name = "S" + std::to_string(i);
            st.interregional = (i == 0);
            reg.add(st);
        }
        CHECK(build_missing_mask(reg).count() == 90);
    }
    SUBCASE("milan-internal times IS-area plus an interregional, by enumeration") {
        StationRegistry reg;
        for (int i = 0; i < 46; ++i) {
            Station st;
            st.name = "S" + std::to_string(i);
            st.interregional = (i == 0);
            st.milan_internal = (i >= 1 && i <= 5);
            st.is_area = (i >= 6 && i <= 15);
            reg.add(st);
        }
        const Mask mask = build_missing_mask(reg);
        int expected = 0;
        for (int i = 0; i < 46; ++i)
            for (int j = 0; j < 46; ++j) {
                if (i == j) continue;
                const Station &a = reg.at(i), &b = reg.at(j);
                if (a.interregional || b.interregional ||
                    (a.milan_internal && b.is_area) || (a.is_area && b.milan_internal))
                    ++expected;
            }
        CHECK(mask.count() == expected);
        CHECK(expected == 90 + 2 * 5 * 10);
    }
    SUBCASE("no flags, no mask") {
        StationRegistry reg;
        for (int i = 0; i < 5; ++i) reg.add({"S" + std::to_string(i), false, false, false});
        CHECK(build_missing_mask(reg).count() == 0);
    }
}
