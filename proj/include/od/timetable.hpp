#pragma once

#include <string>
#include <vector>

#include "od/network.hpp"

namespace od {

struct TravelTimeSample {
    StationId origin;
    StationId dest;
    std::string line_id;
    double minutes;
};

/// Mean travel time in minutes per ordered station pair. Entries exist for
/// direct pairs with surviving samples and, after compute_transfers, for
/// pairs reachable with one transfer.
struct TravelTimeMatrix {
    Matrix minutes;
    Mask defined;

    explicit TravelTimeMatrix(int n = 0) : minutes(n, n), defined(n, n) {}
    bool has(StationId i, StationId j) const { return defined(i, j); }
};

/// Optimal single-transfer station k* per pair outside D.
struct TransferTable {
    std::vector<StationId> via; // row-major S*S, -1 where undefined
    int n = 0;

    explicit TransferTable(int n_stations = 0)
        : via(static_cast<size_t>(n_stations) * n_stations, -1), n(n_stations) {}
    StationId at(StationId i, StationId j) const {
        return via[static_cast<size_t>(i) * n + j];
    }
    void set(StationId i, StationId j, StationId k) {
        via[static_cast<size_t>(i) * n + j] = k;
    }
    int count() const {
        int c = 0;
        for (StationId v : via) c += (v >= 0);
        return c;
    }
};

struct TimetableStats {
    long long samples = 0;
    long long rejected_nonpositive = 0;
};

/// Per (pair, line): drops samples strictly outside the [0.05, 0.95]
/// interpolated quantile range, averages the rest, then keeps the fastest
/// line per pair. Pairs with no surviving samples stay undefined.
TravelTimeMatrix estimate_direct_times(const std::vector<TravelTimeSample>& samples,
                                       const DirectPathSet& d, int n_stations,
                                       TimetableStats* stats = nullptr);

/// For each (i,j) outside D with i != j, picks k* minimizing t_ik + t_kj over
/// stations k with both legs direct and defined (ties to the lowest id) and
/// fills t_ij = t_ik* + t_k*j. Pairs with no admissible k stay undefined.
TransferTable compute_transfers(TravelTimeMatrix& t, const DirectPathSet& d,
                                bool parallel = false);

/// Interpolated order-statistic quantile (0 <= q <= 1) of sorted values.
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Timetable file: ride_id,line_id,station,arrival_time,departure_time,date.
/// Emits one sample per ordered stop pair along each ride.
std::vector<TravelTimeSample> load_timetable_samples(const std::string& path,
                                                     const StationRegistry& reg);

} // namespace od
