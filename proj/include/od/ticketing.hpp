#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "od/dates.hpp"
#include "od/network.hpp"
#include "od/timetable.hpp"

namespace od {

enum class TicketKind {
    ordinary,
    special_rate,
    additional_exaction,
    carnet,
    weekly_sub,
    monthly_sub,
    yearly_sub,
    other, // excluded from conversion, counted in the summary
};

constexpr int kNumTicketKinds = 8;

TicketKind parse_ticket_kind(const std::string& text);
const char* ticket_kind_name(TicketKind k);

struct TicketRecord {
    StationId station_a = 0;
    StationId station_b = 0;
    TicketKind kind = TicketKind::other;
    Date purchase_date{};
    double quantity = 0.0; // integer after the shared-fare ceiling
    bool shared_fare = false;
};

/// Shared-fare rows report at most half the real amount and may be
/// fractional; the recorded amount is rounded up to the next integer (the
/// real count cannot be recovered, so no doubling).
TicketRecord apply_shared_fare_ceiling(TicketRecord record);

/// Ticket-estimated trips for one week, before and after transfer
/// separation and gravity filling.
struct WeeklySeedOD {
    int week = 0;
    Matrix x;

    WeeklySeedOD() = default;
    WeeklySeedOD(int w, int n) : week(w), x(n, n) {}
};

struct ConversionStats {
    double converted_mass = 0.0;         // trips placed into the seeds
    double dropped_mass = 0.0;           // trips falling outside the calendar
    long long dropped_attributions = 0;  // drawn days/weeks outside the calendar
    long long excluded_records = 0;      // kind 'other'
    std::array<double, kNumTicketKinds> mass_by_kind{};
};

/// Applies the per-kind attribution rules to every record. Draws come from a
/// record-indexed deterministic stream, so output is reproducible and
/// independent of processing order; all deposits are half-trip multiples,
/// which keeps the sums exact under any thread count.
std::vector<WeeklySeedOD> convert_tickets(const std::vector<TicketRecord>& records,
                                          const WeekCalendar& cal, int n_stations,
                                          uint64_t rng_seed, ConversionStats* stats = nullptr,
                                          int threads = 1);

struct TicketSummary {
    std::array<int64_t, kNumTicketKinds> purchases{}; // summed quantities
    std::array<double, kNumTicketKinds> share{};      // percent of total
    int64_t total_purchases = 0;
    bool shares_defined = false;

    // estimated trips by transfer class (filled from converted seeds)
    double direct_mass = 0.0;
    double one_transfer_mass = 0.0;
    double multi_transfer_mass = 0.0;
    bool has_transfer_classes = false;
};

TicketSummary summarize_tickets(const std::vector<TicketRecord>& records);

/// Splits total converted mass into direct / one-transfer / multi-transfer
/// classes using the transfer table; call on seeds before separation.
void add_transfer_classes(TicketSummary& summary, const std::vector<WeeklySeedOD>& seeds,
                          const TransferTable& kt, const DirectPathSet& d);

/// Moves each non-direct entry onto its two transfer legs; entries with no
/// admissible transfer station are dropped and their mass returned.
double separate_transfers(WeeklySeedOD& seed, const TransferTable& kt, const DirectPathSet& d);

/// Cells with structurally missing ticket data: any pair touching an
/// interregional station, plus Milan-internal <-> IS-area pairs (both
/// orders). Diagonal excluded.
Mask build_missing_mask(const StationRegistry& reg);

/// Ticket file: station_a,station_b,kind,purchase_date,quantity,shared_fare.
/// The shared-fare ceiling is applied on load.
std::vector<TicketRecord> load_ticket_records(const std::string& path,
                                              const StationRegistry& reg);

} // namespace od
