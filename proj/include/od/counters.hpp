#pragma once

#include <string>
#include <vector>

#include "od/dates.hpp"
#include "od/network.hpp"

namespace od {

enum class RideStatus { valid, missing, cancelled };

struct RideCountRecord {
    std::string ride_id;
    StationId station;
    Date date;
    int64_t boarded = 0;  // meaningful only when status == valid
    int64_t alighted = 0;
    RideStatus status = RideStatus::valid;
};

/// Per station-week tallies of the counter dataset, the basis of coverage
/// and margin rescaling.
class CounterAggregate {
public:
    CounterAggregate(int n_stations, int num_weeks);

    void add(const RideCountRecord& rec, const WeekCalendar& cal);

    int n_stations() const { return n_stations_; }
    int num_weeks() const { return num_weeks_; }
    long long out_of_calendar() const { return out_of_calendar_; }

    long long valid_rides(StationId i, int week) const { return cell(i, week).valid; }
    long long non_cancelled_rides(StationId i, int week) const { return cell(i, week).non_cancelled; }
    int64_t partial_boarded(StationId i, int week) const { return cell(i, week).boarded; }
    int64_t partial_alighted(StationId i, int week) const { return cell(i, week).alighted; }

private:
    struct Cell {
        long long valid = 0;
        long long non_cancelled = 0;
        int64_t boarded = 0;
        int64_t alighted = 0;
    };
    const Cell& cell(StationId i, int week) const {
        return cells_[static_cast<size_t>(week) * n_stations_ + i];
    }
    Cell& cell(StationId i, int week) {
        return cells_[static_cast<size_t>(week) * n_stations_ + i];
    }

    int n_stations_, num_weeks_;
    std::vector<Cell> cells_;
    long long out_of_calendar_ = 0;
};

struct Coverage {
    double value = 0.0;
    bool served = false; // false when no non-cancelled ride stops there
};

/// (#valid rides) / (#non-cancelled rides) at a station-week; served=false
/// flags the zero-denominator case.
Coverage compute_coverage(const CounterAggregate& agg, StationId station, int week);

/// Boarded p and alighted a counts per station for one week, rescaled by
/// coverage and rounded half-away-from-zero.
struct MarginVectors {
    int week = 0;
    std::vector<int64_t> p;
    std::vector<int64_t> a;
    std::vector<double> coverage;
    std::vector<uint8_t> served;

    int64_t total_boarded() const {
        int64_t s = 0;
        for (int64_t v : p) s += v;
        return s;
    }
    int64_t total_alighted() const {
        int64_t s = 0;
        for (int64_t v : a) s += v;
        return s;
    }
};

/// Throws when a station-week has non-cancelled rides but zero coverage
/// (nothing to rescale from).
MarginVectors rescale_margins(const CounterAggregate& agg, int week);

/// Counter file: ride_id,line_id,station,date,boarded,alighted,status.
/// Counts must be present exactly when status is valid.
std::vector<RideCountRecord> load_counter_records(const std::string& path,
                                                  const StationRegistry& reg);

} // namespace od
