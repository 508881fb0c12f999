#include "od/ticketing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "od/csv.hpp"
#include "od/rng.hpp"

namespace od {

TicketKind parse_ticket_kind(const std::string& text) {
    if (text == "ordinary") return TicketKind::ordinary;
    if (text == "special_rate") return TicketKind::special_rate;
    if (text == "additional_exaction") return TicketKind::additional_exaction;
    if (text == "carnet") return TicketKind::carnet;
    if (text == "weekly_sub") return TicketKind::weekly_sub;
    if (text == "monthly_sub") return TicketKind::monthly_sub;
    if (text == "yearly_sub") return TicketKind::yearly_sub;
    return TicketKind::other;
}

const char* ticket_kind_name(TicketKind k) {
    switch (k) {
    case TicketKind::ordinary: return "ordinary";
    case TicketKind::special_rate: return "special_rate";
    case TicketKind::additional_exaction: return "additional_exaction";
    case TicketKind::carnet: return "carnet";
    case TicketKind::weekly_sub: return "weekly_sub";
    case TicketKind::monthly_sub: return "monthly_sub";
    case TicketKind::yearly_sub: return "yearly_sub";
    case TicketKind::other: return "other";
    }
    return "other";
}

TicketRecord apply_shared_fare_ceiling(TicketRecord record) {
    record.quantity = std::ceil(record.quantity);
    if (record.quantity < 1.0)
        throw std::invalid_argument("ticket quantity below 1 after ceiling correction");
    return record;
}

namespace {

int64_t integral_quantity(const TicketRecord& rec) {
    const int64_t q = std::llround(rec.quantity);
    if (q < 1 || std::fabs(rec.quantity - static_cast<double>(q)) > 1e-9)
        throw std::invalid_argument("ticket quantity " + std::to_string(rec.quantity) +
                                    " is not a positive integer (shared-fare ceiling missing?)");
    return q;
}

struct Accumulator {
    std::vector<Matrix>* mats;
    const WeekCalendar* cal;
    ConversionStats stats;

    // one attribution event = one drawn day or attributed week, covering
    // both directions with per_direction mass each
    void round_trip(Date day, StationId a, StationId b, double per_direction, TicketKind kind) {
        auto w = cal->week_of(day);
        if (!w) {
            stats.dropped_mass += 2.0 * per_direction;
            ++stats.dropped_attributions;
            return;
        }
        Matrix& m = (*mats)[static_cast<size_t>(*w)];
        m(a, b) += per_direction;
        m(b, a) += per_direction;
        stats.converted_mass += 2.0 * per_direction;
        stats.mass_by_kind[static_cast<int>(kind)] += 2.0 * per_direction;
    }
};

// full weeks carry 5 round trips; partial weeks round(5/7 * days)
void attribute_weeks(Accumulator& acc, Date start, Date end, const TicketRecord& rec) {
    using std::chrono::days;
    for (Date monday = monday_of(start); monday <= end; monday += days(7)) {
        const Date lo = std::max(monday, start);
        const Date hi = std::min(monday + days(6), end);
        const long n_days = (hi - lo).count() + 1;
        const int64_t trips = (n_days == 7) ? 5 : std::llround(5.0 / 7.0 * double(n_days));
        if (trips > 0)
            acc.round_trip(monday, rec.station_a, rec.station_b, double(trips), rec.kind);
    }
}

void convert_record(const TicketRecord& rec, uint64_t ordinal, uint64_t rng_seed,
                    Accumulator& acc) {
    using std::chrono::days;
    if (rec.station_a == rec.station_b)
        throw std::invalid_argument("ticket with identical origin and destination station " +
                                    std::to_string(rec.station_a));
    if (rec.kind == TicketKind::other) {
        ++acc.stats.excluded_records;
        return;
    }
    const int64_t quantity = integral_quantity(rec);
    Rng rng = Rng::for_stream(rng_seed, ordinal);

    switch (rec.kind) {
    case TicketKind::ordinary:
    case TicketKind::special_rate:
    case TicketKind::additional_exaction:
        // one random day in the 7 days after purchase, half a trip per direction
        for (int64_t u = 0; u < quantity; ++u) {
            const Date day = rec.purchase_date + days(1 + rng.below(7));
            acc.round_trip(day, rec.station_a, rec.station_b, 0.5, rec.kind);
        }
        break;
    case TicketKind::carnet:
        // 5 distinct days in the 30 days after purchase, one round trip each
        for (int64_t u = 0; u < quantity; ++u) {
            int64_t drawn[5];
            int n_drawn = 0;
            while (n_drawn < 5) {
                const int64_t off = 1 + rng.below(30);
                bool dup = false;
                for (int k = 0; k < n_drawn; ++k) dup |= (drawn[k] == off);
                if (!dup) drawn[n_drawn++] = off;
            }
            for (int k = 0; k < 5; ++k)
                acc.round_trip(rec.purchase_date + days(drawn[k]), rec.station_a, rec.station_b,
                               1.0, rec.kind);
        }
        break;
    case TicketKind::weekly_sub: {
        // bought Mon-Wed: this week; Thu-Sun: the following week
        const Date monday = monday_of(rec.purchase_date);
        const long dow = (rec.purchase_date - monday).count();
        const Date usage_week = monday + days(dow <= 2 ? 0 : 7);
        for (int64_t u = 0; u < quantity; ++u)
            acc.round_trip(usage_week, rec.station_a, rec.station_b, 5.0, rec.kind);
        break;
    }
    case TicketKind::monthly_sub: {
        // usage month flips to the next month on the 22nd
        const std::chrono::year_month_day ymd{rec.purchase_date};
        Date start, end;
        if (unsigned(ymd.day()) < 22) {
            start = rec.purchase_date;
            end = last_of_month_after(rec.purchase_date, 0);
        } else {
            start = last_of_month_after(rec.purchase_date, 0) + days(1);
            end = last_of_month_after(rec.purchase_date, 1);
        }
        for (int64_t u = 0; u < quantity; ++u)
            attribute_weeks(acc, start, end, rec);
        break;
    }
    case TicketKind::yearly_sub: {
        const Date start = rec.purchase_date;
        const Date end = last_of_month_after(rec.purchase_date, 12);
        for (int64_t u = 0; u < quantity; ++u)
            attribute_weeks(acc, start, end, rec);
        break;
    }
    case TicketKind::other:
        break;
    }
}

} // namespace

std::vector<WeeklySeedOD> convert_tickets(const std::vector<TicketRecord>& records,
                                          const WeekCalendar& cal, int n_stations,
                                          uint64_t rng_seed, ConversionStats* stats,
                                          int threads) {
    const int num_weeks = cal.num_weeks;
    int n_threads = 1;
#ifdef _OPENMP
    if (threads > 1) n_threads = threads;
#endif

    std::vector<Accumulator> acc(static_cast<size_t>(n_threads));
    std::vector<std::vector<Matrix>> partial(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        partial[t].assign(static_cast<size_t>(num_weeks), Matrix(n_stations, n_stations));
        acc[t].mats = &partial[t];
        acc[t].cal = &cal;
    }

    const int64_t n_records = static_cast<int64_t>(records.size());
    std::string first_error;
#pragma omp parallel for schedule(static) num_threads(n_threads) if (n_threads > 1)
    for (int64_t idx = 0; idx < n_records; ++idx) {
        int tid = 0;
#ifdef _OPENMP
        tid = omp_get_thread_num();
#endif
        try {
            convert_record(records[static_cast<size_t>(idx)], static_cast<uint64_t>(idx),
                           rng_seed, acc[static_cast<size_t>(tid)]);
        } catch (const std::exception& e) {
#pragma omp critical
            if (first_error.empty())
                first_error = "ticket record " + std::to_string(idx) + ": " + e.what();
        }
    }
    if (!first_error.empty()) throw std::invalid_argument(first_error);

    // merge in thread order so the additions happen in a fixed sequence
    std::vector<WeeklySeedOD> seeds;
    seeds.reserve(static_cast<size_t>(num_weeks));
    for (int w = 0; w < num_weeks; ++w) seeds.emplace_back(w, n_stations);
    ConversionStats total;
    for (int t = 0; t < n_threads; ++t) {
        for (int w = 0; w < num_weeks; ++w) {
            Matrix& dst = seeds[static_cast<size_t>(w)].x;
            const Matrix& src = partial[t][static_cast<size_t>(w)];
            for (int i = 0; i < n_stations; ++i)
                for (int j = 0; j < n_stations; ++j) dst(i, j) += src(i, j);
        }
        total.converted_mass += acc[t].stats.converted_mass;
        total.dropped_mass += acc[t].stats.dropped_mass;
        total.dropped_attributions += acc[t].stats.dropped_attributions;
        total.excluded_records += acc[t].stats.excluded_records;
        for (int k = 0; k < kNumTicketKinds; ++k)
            total.mass_by_kind[k] += acc[t].stats.mass_by_kind[k];
    }
    if (stats) *stats = total;
    return seeds;
}

TicketSummary summarize_tickets(const std::vector<TicketRecord>& records) {
    TicketSummary s;
    for (const TicketRecord& rec : records) {
        const int64_t q = integral_quantity(rec);
        s.purchases[static_cast<int>(rec.kind)] += q;
        s.total_purchases += q;
    }
    if (s.total_purchases > 0) {
        for (int k = 0; k < kNumTicketKinds; ++k)
            s.share[k] = 100.0 * static_cast<double>(s.purchases[k]) /
                         static_cast<double>(s.total_purchases);
        s.shares_defined = true;
    }
    return s;
}

void add_transfer_classes(TicketSummary& summary, const std::vector<WeeklySeedOD>& seeds,
                          const TransferTable& kt, const DirectPathSet& d) {
    summary.direct_mass = summary.one_transfer_mass = summary.multi_transfer_mass = 0.0;
    for (const WeeklySeedOD& seed : seeds) {
        const int n = seed.x.rows();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double v = seed.x(i, j);
                if (i == j || v == 0.0) continue;
                if (d.contains(i, j))
                    summary.direct_mass += v;
                else if (kt.at(i, j) >= 0)
                    summary.one_transfer_mass += v;
                else
                    summary.multi_transfer_mass += v;
            }
        }
    }
    summary.has_transfer_classes = true;
}

double separate_transfers(WeeklySeedOD& seed, const TransferTable& kt, const DirectPathSet& d) {
    const int n = seed.x.rows();
    double dropped = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || d.contains(i, j)) continue;
            const double v = seed.x(i, j);
            if (v == 0.0) continue;
            const StationId k = kt.at(i, j);
            if (k >= 0) {
                seed.x(i, k) += v;
                seed.x(k, j) += v;
            } else {
                dropped += v; // needs more than one transfer
            }
            seed.x(i, j) = 0.0;
        }
    }
    return dropped;
}

Mask build_missing_mask(const StationRegistry& reg) {
    const int n = reg.size();
    Mask mask(n, n);
    for (int i = 0; i < n; ++i) {
        const Station& si = reg.at(i);
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const Station& sj = reg.at(j);
            const bool fare_gap = si.interregional || sj.interregional ||
                                  (si.milan_internal && sj.is_area) ||
                                  (si.is_area && sj.milan_internal);
            if (fare_gap) mask.set(i, j, true);
        }
    }
    return mask;
}

std::vector<TicketRecord> load_ticket_records(const std::string& path,
                                              const StationRegistry& reg) {
    CsvReader in(path, "station_a,station_b,kind,purchase_date,quantity,shared_fare");
    std::vector<TicketRecord> records;
    std::vector<std::string> f;
    while (in.next(f)) {
        TicketRecord rec;
        rec.station_a = reg.require(f[0]);
        rec.station_b = reg.require(f[1]);
        if (rec.station_a == rec.station_b)
            in.fail("ticket with identical origin and destination '" + f[0] + "'");
        rec.kind = parse_ticket_kind(f[2]);
        rec.purchase_date = parse_date(f[3]);
        rec.quantity = parse_double(f[4], in);
        rec.shared_fare = parse_bool01(f[5], in);
        if (rec.shared_fare) {
            rec = apply_shared_fare_ceiling(rec);
        } else if (rec.quantity < 1.0 ||
                   std::fabs(rec.quantity - std::round(rec.quantity)) > 1e-9) {
            in.fail("quantity '" + f[4] + "' must be a positive integer unless shared_fare");
        }
        records.push_back(rec);
    }
    return records;
}

} // namespace od
