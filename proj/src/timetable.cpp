#include "od/timetable.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "od/csv.hpp"

namespace od {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty())
        throw std::invalid_argument("quantile of empty sample");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

namespace {

double trimmed_mean(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    const double q05 = quantile_sorted(values, 0.05);
    const double q95 = quantile_sorted(values, 0.95);
    double sum = 0.0;
    long long kept = 0;
    for (double v : values) {
        if (v < q05 || v > q95) continue;
        sum += v;
        ++kept;
    }
    // the quantile bounds are attained by order statistics, so kept >= 1
    return sum / static_cast<double>(kept);
}

} // namespace

TravelTimeMatrix estimate_direct_times(const std::vector<TravelTimeSample>& samples,
                                       const DirectPathSet& d, int n_stations,
                                       TimetableStats* stats) {
    // group minutes per (ordered pair, line); trimming is line-specific
    std::map<std::pair<std::pair<StationId, StationId>, std::string>, std::vector<double>> groups;
    TimetableStats local;
    for (const TravelTimeSample& s : samples) {
        ++local.samples;
        if (s.origin < 0 || s.origin >= n_stations || s.dest < 0 || s.dest >= n_stations)
            throw std::invalid_argument("travel time sample references station outside registry");
        if (!d.contains(s.origin, s.dest))
            throw std::invalid_argument("travel time sample for non-direct pair (" +
                                        std::to_string(s.origin) + "," + std::to_string(s.dest) +
                                        ") on line '" + s.line_id + "'");
        if (!(s.minutes > 0.0)) {
            ++local.rejected_nonpositive;
            continue;
        }
        groups[{{s.origin, s.dest}, s.line_id}].push_back(s.minutes);
    }

    TravelTimeMatrix t(n_stations);
    for (auto& [key, minutes] : groups) {
        const double mean = trimmed_mean(minutes);
        const StationId i = key.first.first;
        const StationId j = key.first.second;
        if (!t.defined(i, j) || mean < t.minutes(i, j)) {
            t.minutes(i, j) = mean; // fastest line wins
            t.defined.set(i, j, true);
        }
    }
    if (stats) *stats = local;
    return t;
}

TransferTable compute_transfers(TravelTimeMatrix& t, const DirectPathSet& d, bool parallel) {
    const int n = t.minutes.rows();
    TransferTable table(n);

    // legs read below are direct cells, targets written are non-direct cells,
    // so the in-place update is race-free
#pragma omp parallel for collapse(2) schedule(static) if (parallel)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || d.contains(i, j)) continue;
            StationId best = -1;
            double best_time = 0.0;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (!d.contains(i, k) || !d.contains(k, j)) continue;
                if (!t.defined(i, k) || !t.defined(k, j)) continue;
                const double composite = t.minutes(i, k) + t.minutes(k, j);
                if (best < 0 || composite < best_time) {
                    best = k;
                    best_time = composite;
                }
            }
            if (best >= 0) {
                table.set(i, j, best);
                t.minutes(i, j) = best_time;
                t.defined.set(i, j, true);
            }
        }
    }
    return table;
}

namespace {

// "HH:MM:SS" -> seconds since midnight
long parse_time_of_day(const std::string& field, const CsvReader& ctx) {
    int h = 0, m = 0, s = 0;
    char tail = 0;
    if (std::sscanf(field.c_str(), "%d:%d:%d%c", &h, &m, &s, &tail) != 3 ||
        h < 0 || h > 23 || m < 0 || m > 59 || s < 0 || s > 59)
        ctx.fail("bad time '" + field + "' (expected HH:MM:SS)");
    return 3600L * h + 60L * m + s;
}

struct Stop {
    StationId station;
    long arrival;
    long departure;
};

} // namespace

std::vector<TravelTimeSample> load_timetable_samples(const std::string& path,
                                                     const StationRegistry& reg) {
    CsvReader in(path, "ride_id,line_id,station,arrival_time,departure_time,date");
    std::vector<std::string> f;

    // stops per ride in file order; rides keyed by (ride_id, date) so the
    // same ride number on different days never merges
    std::map<std::pair<std::string, std::string>, std::pair<std::string, std::vector<Stop>>> rides;
    while (in.next(f)) {
        parse_date(f[5]);
        Stop stop{reg.require(f[2]), parse_time_of_day(f[3], in), parse_time_of_day(f[4], in)};
        auto& [line_id, stops] = rides[{f[0], f[5]}];
        if (line_id.empty())
            line_id = f[1];
        else if (line_id != f[1])
            in.fail("ride '" + f[0] + "' switches line from '" + line_id + "' to '" + f[1] + "'");
        stops.push_back(stop);
    }

    std::vector<TravelTimeSample> samples;
    for (const auto& [key, ride] : rides) {
        const auto& [line_id, stops] = ride;
        for (size_t a = 0; a < stops.size(); ++a) {
            for (size_t b = a + 1; b < stops.size(); ++b) {
                const double minutes =
                    static_cast<double>(stops[b].arrival - stops[a].departure) / 60.0;
                samples.push_back({stops[a].station, stops[b].station, line_id, minutes});
            }
        }
    }
    return samples;
}

} // namespace od
