#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "od/counters.hpp"
#include "od/dates.hpp"
#include "od/network.hpp"
#include "od/ticketing.hpp"

namespace od {

/// Parameters of a generated network + data bundle with known ground truth.
struct SyntheticScenario {
    int n_stations = 10;
    int n_lines = 3; // consecutive chains sharing endpoint stations
    int num_weeks = 8;
    Date first_monday = Date(std::chrono::year_month_day{
        std::chrono::year(2022), std::chrono::month(6), std::chrono::day(6)});
    double base_intensity = 60.0; // mean weekly trips per direct pair direction
    double modulation = 0.3;      // sinusoidal week-to-week demand swing
    double dropout = 0.0;         // fraction of rides with missing counts
    double cancelled_rate = 0.0;
    int rides_per_day = 2; // per line and direction
    double weekly_sub_share = 0.0; // share of pair mass sold as weekly subscriptions
    double time_jitter = 0.0;      // uniform +- minutes on segment times
    uint64_t rng_seed = 1;
    // stations flagged for the missing-ticket mask, assigned from id 0 up
    int n_interregional = 0;
    int n_milan_internal = 0;
    int n_is_area = 0;
};

struct TimetableRide {
    std::string ride_id;
    std::string line_id;
    Date date{};
    std::vector<StationId> stops;
    std::vector<long> arrival_s;   // seconds since midnight
    std::vector<long> departure_s;
};

struct SyntheticData {
    StationRegistry registry;
    std::vector<Line> lines;
    WeekCalendar cal;
    std::vector<IntMatrix> truth; // ground-truth OD per week, direct pairs only
    std::vector<TicketRecord> tickets;
    std::vector<RideCountRecord> counters;
    std::vector<std::string> counter_line_ids; // parallel to counters
    std::vector<TimetableRide> rides;          // cancelled rides excluded

    std::vector<int64_t> true_boarded(int week) const;
    std::vector<int64_t> true_alighted(int week) const;
};

/// Deterministic under rng_seed. Ticket mass equals ground truth exactly on
/// unmasked direct pairs (purchases are placed so the drawn usage day always
/// lands in the intended week); counter totals equal the truth margins before
/// dropout degradation.
SyntheticData generate_scenario(const SyntheticScenario& s);

/// Writes stations/lines/tickets/counters/timetable/truth files plus a
/// ready-to-run pipeline config (relative paths) into dir.
void write_scenario(const SyntheticData& data, const SyntheticScenario& s,
                    const std::string& dir);

/// Scenario config file: flat key = value lines mirroring the struct fields.
SyntheticScenario load_scenario(const std::string& path);

} // namespace od
