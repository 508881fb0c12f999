#include "od/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "od/csv.hpp"
#include "od/rng.hpp"

namespace od {

std::vector<int64_t> SyntheticData::true_boarded(int week) const {
    const IntMatrix& m = truth.at(static_cast<size_t>(week));
    std::vector<int64_t> p(static_cast<size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) p[size_t(i)] = m.row_sum(i);
    return p;
}

std::vector<int64_t> SyntheticData::true_alighted(int week) const {
    const IntMatrix& m = truth.at(static_cast<size_t>(week));
    std::vector<int64_t> a(static_cast<size_t>(m.cols()));
    for (int j = 0; j < m.cols(); ++j) a[size_t(j)] = m.col_sum(j);
    return a;
}

namespace {

uint64_t sub_seed(uint64_t seed, uint64_t tag) { return Rng::for_stream(seed, tag).next(); }

std::string station_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "S%02d", i);
    return buf;
}

} // namespace

SyntheticData generate_scenario(const SyntheticScenario& s) {
    using std::chrono::days;
    if (s.n_stations < s.n_lines + 1)
        throw std::invalid_argument("scenario needs at least n_lines + 1 stations");
    if (s.n_lines < 1 || s.num_weeks < 1 || s.rides_per_day < 1)
        throw std::invalid_argument("scenario sizes must be positive");
    if (s.dropout < 0.0 || s.dropout >= 1.0)
        throw std::invalid_argument("dropout must lie in [0, 1)");
    if (s.n_interregional + s.n_milan_internal + s.n_is_area > s.n_stations)
        throw std::invalid_argument("more flagged stations than stations");

    SyntheticData data;
    data.cal = WeekCalendar(s.first_monday, s.num_weeks);

    for (int i = 0; i < s.n_stations; ++i) {
        Station st;
        st.name = station_name(i);
        if (i < s.n_interregional)
            st.interregional = true;
        else if (i < s.n_interregional + s.n_milan_internal)
            st.milan_internal = true;
        else if (i < s.n_interregional + s.n_milan_internal + s.n_is_area)
            st.is_area = true;
        data.registry.add(st);
    }

    // consecutive chains sharing endpoint stations, e.g. 0-1-2-3 / 3-4-5-6
    for (int l = 0; l < s.n_lines; ++l) {
        const int lo = l * (s.n_stations - 1) / s.n_lines;
        const int hi = (l + 1) * (s.n_stations - 1) / s.n_lines;
        Line line;
        line.line_id = "L" + std::to_string(l);
        for (int i = lo; i <= hi; ++i) line.stations.push_back(i);
        line.validate(s.n_stations);
        data.lines.push_back(std::move(line));
    }
    const DirectPathSet direct = build_direct_paths(data.lines, s.n_stations);
    const Mask mask = build_missing_mask(data.registry);

    const uint64_t seed_pair = sub_seed(s.rng_seed, 1);
    const uint64_t seed_truth = sub_seed(s.rng_seed, 2);
    const uint64_t seed_status = sub_seed(s.rng_seed, 3);
    const uint64_t seed_jitter = sub_seed(s.rng_seed, 4);

    const int n = s.n_stations;
    Matrix pair_factor(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Rng rng = Rng::for_stream(seed_pair, uint64_t(i) * n + j);
            pair_factor(i, j) = 0.5 + rng.uniform();
        }

    // symmetric ground truth per unordered direct pair
    data.truth.assign(static_cast<size_t>(s.num_weeks), IntMatrix(n, n));
    for (int w = 0; w < s.num_weeks; ++w) {
        const double mod =
            1.0 + s.modulation * std::sin(2.0 * M_PI * double(w) / double(s.num_weeks));
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (!direct.contains(i, j)) continue;
                Rng rng = Rng::for_stream(seed_truth, (uint64_t(w) * n + i) * n + j);
                const int64_t trips = rng.poisson(s.base_intensity * pair_factor(i, j) * mod);
                data.truth[size_t(w)](i, j) = trips;
                data.truth[size_t(w)](j, i) = trips;
            }
        }
    }

    // tickets: buying ordinaries the Sunday before the week pins the drawn
    // usage day inside it, so converted mass reproduces the truth exactly;
    // masked pairs sell no tickets at all
    for (int w = 0; w < s.num_weeks; ++w) {
        const Date monday = data.cal.week_start(w);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const int64_t trips = data.truth[size_t(w)](i, j);
                if (trips <= 0 || mask(i, j) || mask(j, i)) continue;
                int64_t subs = 0;
                if (s.weekly_sub_share > 0.0)
                    subs = static_cast<int64_t>(s.weekly_sub_share * double(trips) / 5.0);
                const int64_t ordinary = 2 * (trips - 5 * subs);
                if (subs > 0)
                    data.tickets.push_back(
                        {i, j, TicketKind::weekly_sub, monday, double(subs), false});
                if (ordinary > 0)
                    data.tickets.push_back(
                        {i, j, TicketKind::ordinary, monday - days(1), double(ordinary), false});
            }
        }
    }

    // ride roster: every line runs rides_per_day per direction every day
    struct RideDraft {
        TimetableRide ride;
        bool cancelled = false;
        bool missing = false;
        std::vector<int64_t> boarded, alighted;
    };
    std::vector<RideDraft> roster;
    uint64_t ride_ordinal = 0;
    for (int d = 0; d < 7 * s.num_weeks; ++d) {
        const Date date = s.first_monday + days(d);
        for (int l = 0; l < s.n_lines; ++l) {
            for (int dir = 0; dir < 2; ++dir) {
                for (int r = 0; r < s.rides_per_day; ++r) {
                    RideDraft draft;
                    draft.ride.ride_id = "R" + std::to_string(l) + (dir == 0 ? "f" : "r") +
                                         std::to_string(r);
                    draft.ride.line_id = data.lines[size_t(l)].line_id;
                    draft.ride.date = date;
                    draft.ride.stops = data.lines[size_t(l)].stations;
                    if (dir == 1)
                        std::reverse(draft.ride.stops.begin(), draft.ride.stops.end());

                    Rng status_rng = Rng::for_stream(seed_status, ride_ordinal);
                    draft.cancelled = status_rng.uniform() < s.cancelled_rate;
                    draft.missing = !draft.cancelled && status_rng.uniform() < s.dropout;

                    Rng jitter_rng = Rng::for_stream(seed_jitter, ride_ordinal);
                    long clock = 6 * 3600 + r * 3600 + dir * 1800;
                    draft.ride.arrival_s.push_back(clock);
                    draft.ride.departure_s.push_back(clock);
                    for (size_t m = 1; m < draft.ride.stops.size(); ++m) {
                        double minutes = 6.0 + 3.0 * double((l + int(m)) % 4);
                        if (s.time_jitter > 0.0)
                            minutes += jitter_rng.uniform(-s.time_jitter, s.time_jitter);
                        clock += std::lround(minutes * 60.0);
                        draft.ride.arrival_s.push_back(clock);
                        clock += 60; // dwell
                        draft.ride.departure_s.push_back(clock);
                    }
                    draft.boarded.assign(draft.ride.stops.size(), 0);
                    draft.alighted.assign(draft.ride.stops.size(), 0);
                    roster.push_back(std::move(draft));
                    ++ride_ordinal;
                }
            }
        }
    }

    // spread each station-week margin across its non-cancelled rides as
    // evenly as integers allow, so rescaling can recover it
    std::vector<std::vector<std::pair<size_t, size_t>>> stop_index(
        static_cast<size_t>(s.num_weeks) * n);
    for (size_t ri = 0; ri < roster.size(); ++ri) {
        if (roster[ri].cancelled) continue;
        const auto week = data.cal.week_of(roster[ri].ride.date);
        for (size_t m = 0; m < roster[ri].ride.stops.size(); ++m)
            stop_index[size_t(*week) * n + roster[ri].ride.stops[m]].push_back({ri, m});
    }
    for (int w = 0; w < s.num_weeks; ++w) {
        const std::vector<int64_t> p = data.true_boarded(w);
        const std::vector<int64_t> a = data.true_alighted(w);
        for (int i = 0; i < n; ++i) {
            const auto& stops = stop_index[size_t(w) * n + i];
            if (stops.empty()) continue;
            const auto count = static_cast<int64_t>(stops.size());
            const int64_t pb = p[size_t(i)] / count, pr = p[size_t(i)] % count;
            const int64_t ab = a[size_t(i)] / count, ar = a[size_t(i)] % count;
            for (size_t k = 0; k < stops.size(); ++k) {
                roster[stops[k].first].boarded[stops[k].second] =
                    pb + (static_cast<int64_t>(k) < pr ? 1 : 0);
                roster[stops[k].first].alighted[stops[k].second] =
                    ab + (static_cast<int64_t>(k) < ar ? 1 : 0);
            }
        }
    }

    for (const RideDraft& draft : roster) {
        for (size_t m = 0; m < draft.ride.stops.size(); ++m) {
            RideCountRecord rec;
            rec.ride_id = draft.ride.ride_id;
            rec.station = draft.ride.stops[m];
            rec.date = draft.ride.date;
            if (draft.cancelled) {
                rec.status = RideStatus::cancelled;
            } else if (draft.missing) {
                rec.status = RideStatus::missing;
            } else {
                rec.status = RideStatus::valid;
                rec.boarded = draft.boarded[m];
                rec.alighted = draft.alighted[m];
            }
            data.counters.push_back(std::move(rec));
            data.counter_line_ids.push_back(draft.ride.line_id);
        }
        if (!draft.cancelled) data.rides.push_back(draft.ride);
    }
    return data;
}

namespace {

std::string time_of_day(long seconds) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02ld:%02ld:%02ld", seconds / 3600, (seconds / 60) % 60,
                  seconds % 60);
    return buf;
}

} // namespace

void write_scenario(const SyntheticData& data, const SyntheticScenario& s,
                    const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };

    {
        auto out = open_output(path("stations.csv"));
        out << "station_id,name,milan_internal,is_area,interregional\n";
        for (int i = 0; i < data.registry.size(); ++i) {
            const Station& st = data.registry.at(i);
            out << i << ',' << st.name << ',' << int(st.milan_internal) << ','
                << int(st.is_area) << ',' << int(st.interregional) << '\n';
        }
    }
    {
        auto out = open_output(path("lines.csv"));
        out << "line_id,station_sequence\n";
        for (const Line& line : data.lines) {
            out << line.line_id << ',';
            for (size_t m = 0; m < line.stations.size(); ++m) {
                if (m) out << '|';
                out << data.registry.at(line.stations[m]).name;
            }
            out << '\n';
        }
    }
    {
        auto out = open_output(path("tickets.csv"));
        out << "station_a,station_b,kind,purchase_date,quantity,shared_fare\n";
        for (const TicketRecord& t : data.tickets) {
            out << data.registry.at(t.station_a).name << ','
                << data.registry.at(t.station_b).name << ',' << ticket_kind_name(t.kind) << ','
                << format_date(t.purchase_date) << ',' << format_double(t.quantity) << ','
                << int(t.shared_fare) << '\n';
        }
    }
    {
        auto out = open_output(path("counters.csv"));
        out << "ride_id,line_id,station,date,boarded,alighted,status\n";
        for (size_t r = 0; r < data.counters.size(); ++r) {
            const RideCountRecord& rec = data.counters[r];
            out << rec.ride_id << ',' << data.counter_line_ids[r] << ','
                << data.registry.at(rec.station).name << ',' << format_date(rec.date) << ',';
            if (rec.status == RideStatus::valid)
                out << rec.boarded << ',' << rec.alighted << ",valid\n";
            else
                out << ",," << (rec.status == RideStatus::missing ? "missing" : "cancelled")
                    << '\n';
        }
    }
    {
        auto out = open_output(path("timetable.csv"));
        out << "ride_id,line_id,station,arrival_time,departure_time,date\n";
        for (const TimetableRide& ride : data.rides) {
            for (size_t m = 0; m < ride.stops.size(); ++m) {
                out << ride.ride_id << ',' << ride.line_id << ','
                    << data.registry.at(ride.stops[m]).name << ','
                    << time_of_day(ride.arrival_s[m]) << ',' << time_of_day(ride.departure_s[m])
                    << ',' << format_date(ride.date) << '\n';
            }
        }
    }
    {
        auto out = open_output(path("truth.csv"));
        out << "week,origin,dest,trips\n";
        for (size_t w = 0; w < data.truth.size(); ++w) {
            const IntMatrix& m = data.truth[w];
            for (int i = 0; i < m.rows(); ++i)
                for (int j = 0; j < m.cols(); ++j)
                    if (m(i, j) != 0)
                        out << w << ',' << i << ',' << j << ',' << m(i, j) << '\n';
        }
    }
    {
        auto out = open_output(path("pipeline.conf"));
        out << "# generated scenario; paths are relative to this file\n"
            << "stations = stations.csv\n"
            << "lines = lines.csv\n"
            << "tickets = tickets.csv\n"
            << "counters = counters.csv\n"
            << "timetable = timetable.csv\n"
            << "first_monday = " << format_date(s.first_monday) << '\n'
            << "num_weeks = " << s.num_weeks << '\n'
            << "rng_seed = " << s.rng_seed << '\n'
            << "out_dir = out\n";
    }
}

namespace {

long long scenario_int(const std::string& v, const std::string& key) {
    try {
        return std::stoll(v);
    } catch (const std::exception&) {
        throw std::runtime_error("scenario key '" + key + "': bad integer '" + v + "'");
    }
}

double scenario_double(const std::string& v, const std::string& key) {
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw std::runtime_error("scenario key '" + key + "': bad number '" + v + "'");
    }
}

} // namespace

SyntheticScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scenario config " + path);
    SyntheticScenario s;
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string v) {
            const auto b = v.find_first_not_of(" \t\r");
            const auto e = v.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        if (key == "n_stations") s.n_stations = int(scenario_int(value, key));
        else if (key == "n_lines") s.n_lines = int(scenario_int(value, key));
        else if (key == "num_weeks") s.num_weeks = int(scenario_int(value, key));
        else if (key == "first_monday") s.first_monday = parse_date(value);
        else if (key == "base_intensity") s.base_intensity = scenario_double(value, key);
        else if (key == "modulation") s.modulation = scenario_double(value, key);
        else if (key == "dropout") s.dropout = scenario_double(value, key);
        else if (key == "cancelled_rate") s.cancelled_rate = scenario_double(value, key);
        else if (key == "rides_per_day") s.rides_per_day = int(scenario_int(value, key));
        else if (key == "weekly_sub_share") s.weekly_sub_share = scenario_double(value, key);
        else if (key == "time_jitter") s.time_jitter = scenario_double(value, key);
        else if (key == "rng_seed") s.rng_seed = uint64_t(scenario_int(value, key));
        else if (key == "n_interregional") s.n_interregional = int(scenario_int(value, key));
        else if (key == "n_milan_internal") s.n_milan_internal = int(scenario_int(value, key));
        else if (key == "n_is_area") s.n_is_area = int(scenario_int(value, key));
        else
            throw std::runtime_error("unknown scenario key '" + key + "' in " + path);
    }
    return s;
}

} // namespace od
