#include "od/network.hpp"

#include <stdexcept>
#include <unordered_set>

#include "od/csv.hpp"

namespace od {

void StationRegistry::add(Station s) {
    if (s.name.empty())
        throw std::invalid_argument("station with empty name");
    if (s.milan_internal && s.is_area)
        throw std::invalid_argument("station '" + s.name +
                                    "' flagged both milan_internal and is_area");
    auto [it, inserted] = by_name_.emplace(s.name, StationId(stations_.size()));
    if (!inserted)
        throw std::invalid_argument("duplicate station name '" + s.name + "'");
    stations_.push_back(std::move(s));
}

StationId StationRegistry::require(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end())
        throw std::runtime_error("unknown station '" + name + "'");
    return it->second;
}

void Line::validate(int n_stations) const {
    if (stations.size() < 2)
        throw std::invalid_argument("line '" + line_id + "' has fewer than 2 stations");
    std::unordered_set<StationId> seen;
    for (StationId s : stations) {
        if (s < 0 || s >= n_stations)
            throw std::invalid_argument("line '" + line_id + "' references station index " +
                                        std::to_string(s) + " outside the registry");
        if (!seen.insert(s).second)
            throw std::invalid_argument("line '" + line_id + "' repeats a station");
    }
}

DirectPathSet build_direct_paths(const std::vector<Line>& lines, int n_stations) {
    DirectPathSet d(n_stations);
    for (const Line& line : lines) {
        line.validate(n_stations);
        for (size_t a = 0; a < line.stations.size(); ++a) {
            for (size_t b = a + 1; b < line.stations.size(); ++b) {
                d.insert(line.stations[a], line.stations[b]);
                d.insert(line.stations[b], line.stations[a]);
            }
        }
    }
    return d;
}

StationRegistry load_stations(const std::string& path) {
    CsvReader in(path, "station_id,name,milan_internal,is_area,interregional");
    StationRegistry reg;
    std::vector<std::string> f;
    while (in.next(f)) {
        long long id = parse_int(f[0], in);
        if (id != reg.size())
            in.fail("station_id " + f[0] + " out of order, expected " +
                    std::to_string(reg.size()));
        Station s;
        s.name = f[1];
        s.milan_internal = parse_bool01(f[2], in);
        s.is_area = parse_bool01(f[3], in);
        s.interregional = parse_bool01(f[4], in);
        reg.add(std::move(s));
    }
    if (reg.size() == 0)
        throw std::runtime_error(path + ": no stations");
    return reg;
}

std::vector<Line> load_lines(const std::string& path, const StationRegistry& reg) {
    CsvReader in(path, "line_id,station_sequence");
    std::vector<Line> lines;
    std::vector<std::string> f;
    while (in.next(f)) {
        Line line;
        line.line_id = f[0];
        for (const std::string& name : split(f[1], '|'))
            line.stations.push_back(reg.require(name));
        line.validate(reg.size());
        lines.push_back(std::move(line));
    }
    return lines;
}

} // namespace od
