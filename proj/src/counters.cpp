#include "od/counters.hpp"

#include <cmath>
#include <stdexcept>

#include "od/csv.hpp"

namespace od {

CounterAggregate::CounterAggregate(int n_stations, int num_weeks)
    : n_stations_(n_stations), num_weeks_(num_weeks),
      cells_(static_cast<size_t>(n_stations) * num_weeks) {}

void CounterAggregate::add(const RideCountRecord& rec, const WeekCalendar& cal) {
    auto week = cal.week_of(rec.date);
    if (!week) {
        ++out_of_calendar_;
        return;
    }
    if (rec.status == RideStatus::cancelled) return;
    Cell& c = cell(rec.station, *week);
    ++c.non_cancelled;
    if (rec.status == RideStatus::valid) {
        ++c.valid;
        c.boarded += rec.boarded;
        c.alighted += rec.alighted;
    }
}

Coverage compute_coverage(const CounterAggregate& agg, StationId station, int week) {
    const long long denom = agg.non_cancelled_rides(station, week);
    if (denom == 0) return {0.0, false};
    return {static_cast<double>(agg.valid_rides(station, week)) / static_cast<double>(denom),
            true};
}

MarginVectors rescale_margins(const CounterAggregate& agg, int week) {
    const int n = agg.n_stations();
    MarginVectors m;
    m.week = week;
    m.p.assign(n, 0);
    m.a.assign(n, 0);
    m.coverage.assign(n, 0.0);
    m.served.assign(n, 0);
    for (StationId i = 0; i < n; ++i) {
        const Coverage cov = compute_coverage(agg, i, week);
        m.coverage[i] = cov.value;
        m.served[i] = cov.served;
        if (!cov.served) continue; // no service: p = a = 0
        if (cov.value <= 0.0)
            throw std::runtime_error("unrecoverable missing counter data at station " +
                                     std::to_string(i) + " week " + std::to_string(week) +
                                     ": rides present but none with valid counts");
        m.p[i] = std::llround(static_cast<double>(agg.partial_boarded(i, week)) / cov.value);
        m.a[i] = std::llround(static_cast<double>(agg.partial_alighted(i, week)) / cov.value);
    }
    return m;
}

std::vector<RideCountRecord> load_counter_records(const std::string& path,
                                                  const StationRegistry& reg) {
    CsvReader in(path, "ride_id,line_id,station,date,boarded,alighted,status");
    std::vector<RideCountRecord> records;
    std::vector<std::string> f;
    while (in.next(f)) {
        RideCountRecord rec;
        rec.ride_id = f[0];
        rec.station = reg.require(f[2]);
        rec.date = parse_date(f[3]);
        if (f[6] == "valid")
            rec.status = RideStatus::valid;
        else if (f[6] == "missing")
            rec.status = RideStatus::missing;
        else if (f[6] == "cancelled")
            rec.status = RideStatus::cancelled;
        else
            in.fail("unknown status '" + f[6] + "'");
        if (rec.status == RideStatus::valid) {
            rec.boarded = parse_int(f[4], in);
            rec.alighted = parse_int(f[5], in);
            if (rec.boarded < 0 || rec.alighted < 0)
                in.fail("negative passenger count");
        } else if (!f[4].empty() || !f[5].empty()) {
            in.fail("counts present on a " + f[6] + " ride");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace od
