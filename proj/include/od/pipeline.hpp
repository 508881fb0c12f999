#pragma once

#include <string>
#include <vector>

#include "od/analytics.hpp"
#include "od/dates.hpp"

namespace od {

/// Flat key = value configuration. Relative paths resolve against the
/// directory containing the config file.
struct PipelineConfig {
    std::string stations;
    std::string lines;
    std::string tickets;
    std::string counters;
    std::string timetable;
    std::string events; // optional
    Date first_monday{};
    int num_weeks = 0;
    uint64_t rng_seed = 0;
    double ipf_tol = 1e-10;
    int ipf_max_iter = 1000;
    SmoothingGrids grids;
    std::string out_dir = "out";
    int threads = 0; // 0 or 1: serial

    void validate() const; // checks values and file existence
};

PipelineConfig load_config(const std::string& path);

/// Command-line override, same keys as the config file. Relative paths are
/// taken as given (resolved against the working directory).
void apply_override(PipelineConfig& cfg, const std::string& key, const std::string& value);

/// Error carrying the failing stage name.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

extern const std::vector<std::string> kStageNames;
// timetable -> margins -> convert -> separate -> gravity -> ipf -> analytics

/// Runs all stages in order, writing every checkpoint, output file and the
/// run report under out_dir.
void run_pipeline(const PipelineConfig& cfg);

/// Runs one stage from the checkpoints already present in out_dir.
void run_stage(const PipelineConfig& cfg, const std::string& stage);

/// Human-readable rendering of out_dir/run_report.json.
std::string render_report(const std::string& out_dir);

} // namespace od
