#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "od/pipeline.hpp"
#include "od/synth.hpp"

namespace {

void apply_sets(od::PipelineConfig& cfg, const std::vector<std::string>& sets) {
    for (const std::string& item : sets) {
        const size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects key=value, got '" + item + "'");
        od::apply_override(cfg, item.substr(0, eq), item.substr(eq + 1));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weekly origin-destination matrix estimation from ticket sales, "
                 "passenger counts and timetables"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::string stage_name;
    std::string out_dir;
    std::string report_dir;

    CLI::App* run = app.add_subcommand("run", "run the full pipeline");
    run->add_option("--config", config_path, "pipeline config file")->required();
    run->add_option("--set", sets, "override a config key (key=value, repeatable)");

    CLI::App* stage = app.add_subcommand("stage", "run a single stage from checkpoints");
    stage->add_option("name", stage_name, "stage name")
        ->required()
        ->check(CLI::IsMember(od::kStageNames));
    stage->add_option("--config", config_path, "pipeline config file")->required();
    stage->add_option("--set", sets, "override a config key (key=value, repeatable)");

    CLI::App* generate = app.add_subcommand("generate", "write a synthetic scenario");
    generate->add_option("--config", config_path, "scenario config file (defaults when omitted)");
    generate->add_option("--out", out_dir, "output directory")->required();

    CLI::App* report = app.add_subcommand("report", "print the run report");
    report->add_option("--dir", report_dir, "pipeline output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed() || stage->parsed()) {
            od::PipelineConfig cfg = od::load_config(config_path);
            apply_sets(cfg, sets);
            if (run->parsed())
                od::run_pipeline(cfg);
            else
                od::run_stage(cfg, stage_name);
        } else if (generate->parsed()) {
            od::SyntheticScenario scenario;
            if (!config_path.empty()) scenario = od::load_scenario(config_path);
            const od::SyntheticData data = od::generate_scenario(scenario);
            od::write_scenario(data, scenario, out_dir);
            std::cout << "scenario written to " << out_dir << "\n";
        } else if (report->parsed()) {
            std::cout << od::render_report(report_dir);
        }
    } catch (const od::StageError& e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
