#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "od/dates.hpp"
#include "od/matrix.hpp"

namespace od {

using StationId = int32_t;

struct Station {
    std::string name;
    bool milan_internal = false; // Milan urban fare perimeter
    bool is_area = false;        // Integrated Subscription area around Milan
    bool interregional = false;  // fares settled outside the operator's data
};

/// The station set S. Ids are dense indices into `stations` and stay stable
/// for a given registry.
class StationRegistry {
public:
    void add(Station s);

    int size() const { return static_cast<int>(stations_.size()); }
    const Station& at(StationId id) const { return stations_.at(static_cast<size_t>(id)); }

    /// Id for a station name; throws naming the station when unknown.
    StationId require(const std::string& name) const;

    const std::vector<Station>& stations() const { return stations_; }

private:
    std::vector<Station> stations_;
    std::unordered_map<std::string, StationId> by_name_;
};

struct Line {
    std::string line_id;
    std::vector<StationId> stations; // in service order

    void validate(int n_stations) const;
};

/// The relation D of ordered station pairs served by at least one line
/// without a transfer. Symmetric and irreflexive by construction.
class DirectPathSet {
public:
    DirectPathSet() = default;
    explicit DirectPathSet(int n) : membership_(n, n) {}

    bool contains(StationId i, StationId j) const { return membership_(i, j); }
    void insert(StationId i, StationId j) { membership_.set(i, j, true); }
    int n_stations() const { return membership_.rows(); }
    int count() const { return membership_.count(); }

private:
    Mask membership_;
};

/// Marks every distinct ordered pair co-occurring on some line as direct.
DirectPathSet build_direct_paths(const std::vector<Line>& lines, int n_stations);

/// Stations file: station_id,name,milan_internal,is_area,interregional
StationRegistry load_stations(const std::string& path);

/// Lines file: line_id,station_sequence with '|'-separated station names.
std::vector<Line> load_lines(const std::string& path, const StationRegistry& reg);

} // namespace od
