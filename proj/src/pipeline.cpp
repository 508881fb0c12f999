#include "od/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "od/counters.hpp"
#include "od/csv.hpp"
#include "od/gravity.hpp"
#include "od/ipf.hpp"
#include "od/network.hpp"
#include "od/ticketing.hpp"
#include "od/timetable.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace od {

const std::vector<std::string> kStageNames = {"timetable", "margins", "convert", "separate",
                                              "gravity",   "ipf",     "analytics"};

namespace {

std::string trim(const std::string& v) {
    const auto b = v.find_first_not_of(" \t\r");
    const auto e = v.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
}

std::string resolve(const fs::path& base, const std::string& value) {
    if (value.empty()) return value;
    fs::path p(value);
    if (p.is_absolute()) return value;
    return (base / p).lexically_normal().string();
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
    std::vector<int> out;
    for (const std::string& item : split(value, ',')) {
        try {
            out.push_back(std::stoi(trim(item)));
        } catch (const std::exception&) {
            throw std::runtime_error("config key '" + key + "': bad integer '" + item + "'");
        }
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    for (const std::string& item : split(value, ',')) {
        try {
            out.push_back(std::stod(trim(item)));
        } catch (const std::exception&) {
            throw std::runtime_error("config key '" + key + "': bad number '" + item + "'");
        }
    }
    return out;
}

void set_key(PipelineConfig& cfg, const std::string& key, const std::string& value,
             const fs::path& base) {
    if (key == "stations") cfg.stations = resolve(base, value);
    else if (key == "lines") cfg.lines = resolve(base, value);
    else if (key == "tickets") cfg.tickets = resolve(base, value);
    else if (key == "counters") cfg.counters = resolve(base, value);
    else if (key == "timetable") cfg.timetable = resolve(base, value);
    else if (key == "events") cfg.events = resolve(base, value);
    else if (key == "out_dir") cfg.out_dir = resolve(base, value);
    else if (key == "first_monday") cfg.first_monday = parse_date(value);
    else if (key == "num_weeks") cfg.num_weeks = std::stoi(value);
    else if (key == "rng_seed") cfg.rng_seed = std::stoull(value);
    else if (key == "ipf_tol") cfg.ipf_tol = std::stod(value);
    else if (key == "ipf_max_iter") cfg.ipf_max_iter = std::stoi(value);
    else if (key == "basis_candidates") cfg.grids.basis_candidates = parse_int_list(value, key);
    else if (key == "penalty_grid") cfg.grids.penalties = parse_double_list(value, key);
    else if (key == "threads") cfg.threads = std::stoi(value);
    else
        throw std::runtime_error("unknown config key '" + key + "'");
}

} // namespace

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config " + path);
    const fs::path base = fs::path(path).parent_path();
    PipelineConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) continue;
        set_key(cfg, key, trim(line.substr(eq + 1)), base);
    }
    return cfg;
}

void apply_override(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    set_key(cfg, key, value, fs::path());
}

void PipelineConfig::validate() const {
    const std::pair<const char*, const std::string*> paths[] = {
        {"stations", &stations}, {"lines", &lines},         {"tickets", &tickets},
        {"counters", &counters}, {"timetable", &timetable},
    };
    for (const auto& [key, value] : paths) {
        if (value->empty())
            throw std::runtime_error("config error: key '" + std::string(key) + "' is not set");
        if (!fs::exists(*value))
            throw std::runtime_error("config error: " + std::string(key) + " file '" + *value +
                                     "' does not exist");
    }
    if (!events.empty() && !fs::exists(events))
        throw std::runtime_error("config error: events file '" + events + "' does not exist");
    if (num_weeks < 1)
        throw std::runtime_error("config error: num_weeks must be >= 1");
    if (!(ipf_tol > 0.0))
        throw std::runtime_error("config error: ipf_tol must be positive");
    if (ipf_max_iter < 1)
        throw std::runtime_error("config error: ipf_max_iter must be >= 1");
    WeekCalendar(first_monday, num_weeks); // throws unless a Monday
}

// ---------------------------------------------------------------------------
// checkpoint files

namespace {

struct NetworkContext {
    StationRegistry reg;
    std::vector<Line> lines;
    DirectPathSet direct;
    WeekCalendar cal;
    Mask mask;
};

NetworkContext load_network(const PipelineConfig& cfg) {
    NetworkContext net;
    net.reg = load_stations(cfg.stations);
    net.lines = load_lines(cfg.lines, net.reg);
    net.direct = build_direct_paths(net.lines, net.reg.size());
    net.cal = WeekCalendar(cfg.first_monday, cfg.num_weeks);
    net.mask = build_missing_mask(net.reg);
    return net;
}

std::string out_path(const PipelineConfig& cfg, const char* name) {
    return (fs::path(cfg.out_dir) / name).string();
}

void save_travel_times(const PipelineConfig& cfg, const TravelTimeMatrix& t,
                       const DirectPathSet& d) {
    auto out = open_output(out_path(cfg, "travel_times.csv"));
    out << "origin,dest,minutes,mode\n";
    for (int i = 0; i < t.minutes.rows(); ++i)
        for (int j = 0; j < t.minutes.cols(); ++j)
            if (t.defined(i, j))
                out << i << ',' << j << ',' << format_double(t.minutes(i, j)) << ','
                    << (d.contains(i, j) ? "direct" : "transfer") << '\n';
}

TravelTimeMatrix load_travel_times(const PipelineConfig& cfg, int n) {
    CsvReader in(out_path(cfg, "travel_times.csv"), "origin,dest,minutes,mode");
    TravelTimeMatrix t(n);
    std::vector<std::string> f;
    while (in.next(f)) {
        const int i = int(parse_int(f[0], in)), j = int(parse_int(f[1], in));
        t.minutes(i, j) = parse_double(f[2], in);
        t.defined.set(i, j, true);
    }
    return t;
}

void save_transfers(const PipelineConfig& cfg, const TransferTable& kt) {
    auto out = open_output(out_path(cfg, "transfers.csv"));
    out << "origin,dest,via\n";
    for (int i = 0; i < kt.n; ++i)
        for (int j = 0; j < kt.n; ++j)
            if (kt.at(i, j) >= 0) out << i << ',' << j << ',' << kt.at(i, j) << '\n';
}

TransferTable load_transfers(const PipelineConfig& cfg, int n) {
    CsvReader in(out_path(cfg, "transfers.csv"), "origin,dest,via");
    TransferTable kt(n);
    std::vector<std::string> f;
    while (in.next(f))
        kt.set(int(parse_int(f[0], in)), int(parse_int(f[1], in)), int(parse_int(f[2], in)));
    return kt;
}

void save_margins(const PipelineConfig& cfg, const std::vector<MarginVectors>& margins) {
    auto out = open_output(out_path(cfg, "margins.csv"));
    out << "week,station,boarded,alighted,coverage,served\n";
    for (const MarginVectors& m : margins)
        for (size_t i = 0; i < m.p.size(); ++i)
            out << m.week << ',' << i << ',' << m.p[i] << ',' << m.a[i] << ','
                << format_double(m.coverage[i]) << ',' << int(m.served[i]) << '\n';
}

std::vector<MarginVectors> load_margins(const PipelineConfig& cfg, int n) {
    CsvReader in(out_path(cfg, "margins.csv"), "week,station,boarded,alighted,coverage,served");
    std::vector<MarginVectors> margins(static_cast<size_t>(cfg.num_weeks));
    for (int w = 0; w < cfg.num_weeks; ++w) {
        margins[size_t(w)].week = w;
        margins[size_t(w)].p.assign(size_t(n), 0);
        margins[size_t(w)].a.assign(size_t(n), 0);
        margins[size_t(w)].coverage.assign(size_t(n), 0.0);
        margins[size_t(w)].served.assign(size_t(n), 0);
    }
    std::vector<std::string> f;
    while (in.next(f)) {
        const int w = int(parse_int(f[0], in));
        const int i = int(parse_int(f[1], in));
        if (w < 0 || w >= cfg.num_weeks || i < 0 || i >= n) in.fail("week or station out of range");
        MarginVectors& m = margins[size_t(w)];
        m.p[size_t(i)] = parse_int(f[2], in);
        m.a[size_t(i)] = parse_int(f[3], in);
        m.coverage[size_t(i)] = parse_double(f[4], in);
        m.served[size_t(i)] = uint8_t(parse_int(f[5], in));
    }
    return margins;
}

void save_seeds(const std::string& path, const std::vector<WeeklySeedOD>& seeds) {
    auto out = open_output(path);
    out << "week,origin,dest,mass\n";
    for (const WeeklySeedOD& seed : seeds)
        for (int i = 0; i < seed.x.rows(); ++i)
            for (int j = 0; j < seed.x.cols(); ++j)
                if (seed.x(i, j) != 0.0)
                    out << seed.week << ',' << i << ',' << j << ','
                        << format_double(seed.x(i, j)) << '\n';
}

std::vector<WeeklySeedOD> load_seeds(const std::string& path, int n, int num_weeks) {
    CsvReader in(path, "week,origin,dest,mass");
    std::vector<WeeklySeedOD> seeds;
    seeds.reserve(static_cast<size_t>(num_weeks));
    for (int w = 0; w < num_weeks; ++w) seeds.emplace_back(w, n);
    std::vector<std::string> f;
    while (in.next(f)) {
        const int w = int(parse_int(f[0], in));
        if (w < 0 || w >= num_weeks) in.fail("week out of range");
        seeds[size_t(w)].x(int(parse_int(f[1], in)), int(parse_int(f[2], in))) =
            parse_double(f[3], in);
    }
    return seeds;
}

void save_gravity_fit(const PipelineConfig& cfg, const GravityFit& fit) {
    auto out = open_output(out_path(cfg, "gravity_fit.txt"));
    out << "log_k " << format_double(fit.log_k) << '\n'
        << "alpha " << format_double(fit.alpha) << '\n'
        << "beta " << format_double(fit.beta) << '\n'
        << "gamma " << format_double(fit.gamma) << '\n'
        << "r_squared " << format_double(fit.r_squared) << '\n'
        << "n_obs " << fit.n_obs << '\n';
}

void save_weekly_ods(const PipelineConfig& cfg, const std::vector<WeeklyOD>& ods) {
    auto out = open_output(out_path(cfg, "od_final.csv"));
    out << "week,origin,dest,trips\n";
    for (const WeeklyOD& od : ods)
        for (int i = 0; i < od.x.rows(); ++i)
            for (int j = 0; j < od.x.cols(); ++j)
                if (od.x(i, j) != 0)
                    out << od.week << ',' << i << ',' << j << ',' << od.x(i, j) << '\n';
}

std::vector<WeeklyOD> load_weekly_ods(const PipelineConfig& cfg, int n) {
    CsvReader in(out_path(cfg, "od_final.csv"), "week,origin,dest,trips");
    std::vector<WeeklyOD> ods(static_cast<size_t>(cfg.num_weeks));
    for (int w = 0; w < cfg.num_weeks; ++w) {
        ods[size_t(w)].week = w;
        ods[size_t(w)].x = IntMatrix(n, n);
    }
    std::vector<std::string> f;
    while (in.next(f)) {
        const int w = int(parse_int(f[0], in));
        if (w < 0 || w >= cfg.num_weeks) in.fail("week out of range");
        ods[size_t(w)].x(int(parse_int(f[1], in)), int(parse_int(f[2], in))) =
            parse_int(f[3], in);
    }
    return ods;
}

void merge_report(const PipelineConfig& cfg, const std::string& stage, const json& entry) {
    const std::string path = out_path(cfg, "run_report.json");
    json report = json::object();
    if (fs::exists(path)) {
        std::ifstream in(path);
        in >> report;
    }
    report[stage] = entry;
    auto out = open_output(path);
    out << report.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// stages

void stage_timetable(const PipelineConfig& cfg) {
    const NetworkContext net = load_network(cfg);
    const auto samples = load_timetable_samples(cfg.timetable, net.reg);
    TimetableStats stats;
    TravelTimeMatrix t = estimate_direct_times(samples, net.direct, net.reg.size(), &stats);
    int direct_defined = 0;
    for (int i = 0; i < net.reg.size(); ++i)
        for (int j = 0; j < net.reg.size(); ++j) direct_defined += t.defined(i, j);
    const TransferTable kt = compute_transfers(t, net.direct, cfg.threads > 1);
    save_travel_times(cfg, t, net.direct);
    save_transfers(cfg, kt);
    merge_report(cfg, "timetable",
                 {{"samples", stats.samples},
                  {"rejected_nonpositive", stats.rejected_nonpositive},
                  {"direct_pairs_defined", direct_defined},
                  {"transfer_pairs", kt.count()}});
}

void stage_margins(const PipelineConfig& cfg) {
    const NetworkContext net = load_network(cfg);
    const auto records = load_counter_records(cfg.counters, net.reg);
    CounterAggregate agg(net.reg.size(), cfg.num_weeks);
    for (const RideCountRecord& rec : records) agg.add(rec, net.cal);
    std::vector<MarginVectors> margins;
    margins.reserve(static_cast<size_t>(cfg.num_weeks));
    for (int w = 0; w < cfg.num_weeks; ++w) margins.push_back(rescale_margins(agg, w));
    save_margins(cfg, margins);
    int64_t boarded = 0, alighted = 0;
    for (const MarginVectors& m : margins) {
        boarded += m.total_boarded();
        alighted += m.total_alighted();
    }
    merge_report(cfg, "margins",
                 {{"records", records.size()},
                  {"out_of_calendar", agg.out_of_calendar()},
                  {"total_boarded", boarded},
                  {"total_alighted", alighted}});
}

void stage_convert(const PipelineConfig& cfg) {
    const NetworkContext net = load_network(cfg);
    const auto records = load_ticket_records(cfg.tickets, net.reg);
    ConversionStats stats;
    const auto seeds =
        convert_tickets(records, net.cal, net.reg.size(), cfg.rng_seed, &stats, cfg.threads);
    save_seeds(out_path(cfg, "seed_converted.csv"), seeds);

    const TicketSummary summary = summarize_tickets(records);
    {
        auto out = open_output(out_path(cfg, "ticket_summary.csv"));
        out << "kind,purchases,share_pct\n";
        for (int k = 0; k < kNumTicketKinds; ++k)
            out << ticket_kind_name(TicketKind(k)) << ',' << summary.purchases[size_t(k)] << ','
                << (summary.shares_defined ? format_double(summary.share[size_t(k)]) : "") << '\n';
    }
    merge_report(cfg, "convert",
                 {{"records", records.size()},
                  {"excluded_records", stats.excluded_records},
                  {"converted_mass", stats.converted_mass},
                  {"dropped_mass", stats.dropped_mass},
                  {"dropped_attributions", stats.dropped_attributions}});
}

void stage_separate(const PipelineConfig& cfg) {
    const NetworkContext net = load_network(cfg);
    auto seeds = load_seeds(out_path(cfg, "seed_converted.csv"), net.reg.size(), cfg.num_weeks);
    const TransferTable kt = load_transfers(cfg, net.reg.size());

    TicketSummary classes;
    add_transfer_classes(classes, seeds, kt, net.direct);
    const double total =
        classes.direct_mass + classes.one_transfer_mass + classes.multi_transfer_mass;
    {
        auto out = open_output(out_path(cfg, "transfer_summary.csv"));
        out << "class,estimated_trips,share_pct\n";
        const std::pair<const char*, double> rows[] = {
            {"direct", classes.direct_mass},
            {"one_transfer", classes.one_transfer_mass},
            {"multi_transfer", classes.multi_transfer_mass}};
        for (const auto& [label, mass] : rows)
            out << label << ',' << format_double(mass) << ','
                << (total > 0.0 ? format_double(100.0 * mass / total) : "") << '\n';
    }

    double dropped = 0.0;
    for (WeeklySeedOD& seed : seeds) dropped += separate_transfers(seed, kt, net.direct);
    save_seeds(out_path(cfg, "seed_separated.csv"), seeds);
    merge_report(cfg, "separate",
                 {{"dropped_mass", dropped},
                  {"direct_mass", classes.direct_mass},
                  {"one_transfer_mass", classes.one_transfer_mass},
                  {"multi_transfer_mass", classes.multi_transfer_mass}});
}

void stage_gravity(const PipelineConfig& cfg) {
    const NetworkContext net = load_network(cfg);
    auto seeds = load_seeds(out_path(cfg, "seed_separated.csv"), net.reg.size(), cfg.num_weeks);
    const auto margins = load_margins(cfg, net.reg.size());
    const TravelTimeMatrix t = load_travel_times(cfg, net.reg.size());

    const auto obs = build_observations(seeds, margins, t, net.mask);
    const GravityFit fit = fit_ols(obs);
    const long long filled = fill_masked_cells(seeds, margins, t, net.mask, fit);

    save_gravity_fit(cfg, fit);
    save_seeds(out_path(cfg, "seed_filled.csv"), seeds);
    merge_report(cfg, "gravity",
                 {{"n_obs", fit.n_obs},
                  {"log_k", fit.log_k},
                  {"alpha", fit.alpha},
                  {"beta", fit.beta},
                  {"gamma", fit.gamma},
                  {"r_squared", fit.r_squared},
                  {"masked_cells", net.mask.count()},
                  {"filled_cells", filled}});
}

void stage_ipf(const PipelineConfig& cfg) {
    const NetworkContext net = load_network(cfg);
    const int n = net.reg.size();
    auto seeds = load_seeds(out_path(cfg, "seed_filled.csv"), n, cfg.num_weeks);
    const auto margins = load_margins(cfg, n);

    struct WeekOutcome {
        WeeklyOD od;
        double eps_row = 0.0, eps_col = 0.0;
        int iterations = 0;
        bool converged = false;
    };
    std::vector<WeekOutcome> outcomes(static_cast<size_t>(cfg.num_weeks));
    std::vector<std::string> errors(static_cast<size_t>(cfg.num_weeks));

    const int n_threads = std::max(1, cfg.threads);
#pragma omp parallel for schedule(dynamic) num_threads(n_threads) if (n_threads > 1)
    for (int w = 0; w < cfg.num_weeks; ++w) {
        try {
            Matrix seed = seeds[size_t(w)].x;
            zero_fill(seed, net.direct, net.mask);
            const MarginVectors& m = margins[size_t(w)];
            const ProbabilitySeed ps = normalize_seed(seed, m.p, m.a);
            IpfOptions opts;
            opts.tol = cfg.ipf_tol;
            opts.max_iter = cfg.ipf_max_iter;
            opts.parallel = false; // weeks already run concurrently
            const IpfResult res = run_ipf(ps, opts);

            WeekOutcome& out = outcomes[size_t(w)];
            out.od = finalize_od(res, m.total_boarded(), w);
            out.iterations = res.iterations;
            out.converged = res.converged;
            // margin errors of the rescaled (pre-rounding) matrix, trip scale
            const double total_p = double(m.total_boarded());
            for (int i = 0; i < n; ++i)
                out.eps_row = std::max(
                    out.eps_row, std::fabs(double(m.p[size_t(i)]) - res.pi.row_sum(i) * total_p));
            for (int j = 0; j < n; ++j)
                out.eps_col = std::max(
                    out.eps_col, std::fabs(double(m.a[size_t(j)]) - res.pi.col_sum(j) * total_p));
        } catch (const std::exception& e) {
            errors[size_t(w)] = e.what();
        }
    }
    for (int w = 0; w < cfg.num_weeks; ++w)
        if (!errors[size_t(w)].empty())
            throw std::runtime_error("week " + std::to_string(w) + ": " + errors[size_t(w)]);

    std::vector<WeeklyOD> ods;
    ods.reserve(outcomes.size());
    for (WeekOutcome& out : outcomes) ods.push_back(std::move(out.od));
    save_weekly_ods(cfg, ods);
    {
        auto out = open_output(out_path(cfg, "ipf_report.csv"));
        out << "week,eps_row,eps_col,iterations,converged\n";
        for (int w = 0; w < cfg.num_weeks; ++w) {
            const WeekOutcome& o = outcomes[size_t(w)];
            out << w << ',' << format_double(o.eps_row) << ',' << format_double(o.eps_col) << ','
                << o.iterations << ',' << int(o.converged) << '\n';
        }
    }
    int max_iterations = 0;
    bool all_converged = true;
    for (const WeekOutcome& o : outcomes) {
        max_iterations = std::max(max_iterations, o.iterations);
        all_converged = all_converged && o.converged;
    }
    merge_report(cfg, "ipf",
                 {{"weeks", cfg.num_weeks},
                  {"all_converged", all_converged},
                  {"max_iterations", max_iterations},
                  {"tol", cfg.ipf_tol}});
}

std::vector<std::string> load_event_labels(const PipelineConfig& cfg, const WeekCalendar& cal) {
    std::vector<std::string> labels(static_cast<size_t>(cal.num_weeks));
    if (cfg.events.empty()) return labels;
    CsvReader in(cfg.events, "date,kind,label");
    std::vector<std::string> f;
    while (in.next(f)) {
        const auto week = cal.week_of(parse_date(f[0]));
        if (!week) continue;
        std::string& slot = labels[size_t(*week)];
        if (!slot.empty()) slot += '|';
        slot += f[1] + ":" + f[2];
    }
    return labels;
}

void stage_analytics(const PipelineConfig& cfg) {
    const NetworkContext net = load_network(cfg);
    const auto ods = load_weekly_ods(cfg, net.reg.size());
    const auto event_labels = load_event_labels(cfg, net.cal);

    const IndicatorSeries mse = mse_series(ods);
    const StrengthCurves curves = strength_curves(ods);
    const IndicatorSeries mean_strength = mean_strength_series(curves);

    SmoothingGrids grids = cfg.grids;
    std::erase_if(grids.basis_candidates, [&](int k) { return k > cfg.num_weeks; });
    if (grids.basis_candidates.empty())
        throw std::runtime_error("no basis candidate fits in " + std::to_string(cfg.num_weeks) +
                                 " weeks (need >= 4)");
    const SmoothedCurves sm = smooth_curves(curves, grids);
    const OutlierReport outliers = functional_boxplot(sm, cfg.threads > 1);

    {
        auto out = open_output(out_path(cfg, "indicators.csv"));
        out << (cfg.events.empty() ? "week,mse,mean_strength" : "week,mse,mean_strength,event_labels");
        out << '\n';
        for (int w = 0; w < cfg.num_weeks; ++w) {
            out << w << ',';
            if (w > 0) out << format_double(mse.values[size_t(w - 1)]);
            out << ',' << format_double(mean_strength.values[size_t(w)]);
            if (!cfg.events.empty()) out << ',' << event_labels[size_t(w)];
            out << '\n';
        }
    }
    {
        auto out = open_output(out_path(cfg, "curves.csv"));
        out << "station,week,sigma,sigma_norm,fitted\n";
        for (int i = 0; i < net.reg.size(); ++i)
            for (int w = 0; w < cfg.num_weeks; ++w)
                out << i << ',' << w << ',' << format_double(curves.sigma(i, w)) << ','
                    << format_double(curves.sigma_norm(i, w)) << ','
                    << format_double(sm.fitted(i, w)) << '\n';
    }
    {
        auto out = open_output(out_path(cfg, "outliers.csv"));
        out << "station,depth,flag\n";
        for (int i = 0; i < net.reg.size(); ++i)
            out << i << ',' << format_double(outliers.depth[size_t(i)]) << ','
                << int(outliers.flagged[size_t(i)]) << '\n';
    }
    int n_outliers = 0;
    for (uint8_t fl : outliers.flagged) n_outliers += fl;
    merge_report(cfg, "analytics",
                 {{"basis_count", sm.n_basis},
                  {"penalty", sm.penalty},
                  {"mean_gcv", sm.mean_gcv},
                  {"outliers", n_outliers}});
}

void dispatch_stage(const PipelineConfig& cfg, const std::string& stage) {
    if (stage == "timetable") stage_timetable(cfg);
    else if (stage == "margins") stage_margins(cfg);
    else if (stage == "convert") stage_convert(cfg);
    else if (stage == "separate") stage_separate(cfg);
    else if (stage == "gravity") stage_gravity(cfg);
    else if (stage == "ipf") stage_ipf(cfg);
    else if (stage == "analytics") stage_analytics(cfg);
    else
        throw std::runtime_error("unknown stage '" + stage + "'");
}

} // namespace

void run_stage(const PipelineConfig& cfg, const std::string& stage) {
    try {
        cfg.validate();
        fs::create_directories(cfg.out_dir);
        dispatch_stage(cfg, stage);
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

void run_pipeline(const PipelineConfig& cfg) {
    try {
        cfg.validate();
        fs::create_directories(cfg.out_dir);
        const std::string report = out_path(cfg, "run_report.json");
        if (fs::exists(report)) fs::remove(report); // full runs start clean
    } catch (const std::exception& e) {
        throw StageError("config", e.what());
    }
    for (const std::string& stage : kStageNames) run_stage(cfg, stage);
}

std::string render_report(const std::string& out_dir) {
    const std::string path = (fs::path(out_dir) / "run_report.json").string();
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("no run report at " + path + " (run the pipeline first)");
    json report;
    in >> report;
    std::string text;
    for (const std::string& stage : kStageNames) {
        if (!report.contains(stage)) continue;
        text += stage + "\n";
        for (const auto& [key, value] : report[stage].items())
            text += "  " + key + " = " + value.dump() + "\n";
    }
    for (const auto& [key, value] : report.items()) {
        if (std::find(kStageNames.begin(), kStageNames.end(), key) != kStageNames.end()) continue;
        text += key + "\n";
        for (const auto& [k2, v2] : value.items()) text += "  " + k2 + " = " + v2.dump() + "\n";
    }
    return text;
}

} // namespace od
