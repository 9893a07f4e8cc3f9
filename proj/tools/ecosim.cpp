// Command-line front end for the digital-ecosystem simulator.
//
//   ecosim run      --scenario <name> --steps N --runs K --seed S [--config F] --out DIR
//   ecosim compare  --scenarios a,b,... [--steps N --runs K --seed S --config F] --out DIR
//   ecosim filter   --map FILE --in FILE
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecosim/io.hpp"
#include "ecosim/semantic.hpp"
#include "ecosim/simulation.hpp"

namespace {

struct CommonOptions {
    std::string scenario;
    std::string scenarios;
    std::string config_path;
    std::string out_dir;
    std::string map_path;
    std::string in_path;
    int steps = -1;
    int runs = -1;
    long long seed = -1;
};

ecosim::SimConfig assemble_config(const CommonOptions& opts) {
    ecosim::SimConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = ecosim::load_config_file(opts.config_path, cfg);
    }
    if (!opts.scenario.empty()) cfg.scenario = ecosim::scenario_from_string(opts.scenario);
    if (opts.steps >= 0) cfg.steps = opts.steps;
    if (opts.runs >= 0) cfg.runs = opts.runs;
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    cfg.validate();
    return cfg;
}

int run_command(const CommonOptions& opts) {
    ecosim::SimConfig cfg = assemble_config(opts);
    const auto result = ecosim::run_scenario(cfg);
    const auto row = ecosim::write_scenario_outputs(result, opts.out_dir);
    ecosim::write_file(opts.out_dir + "/summary.csv", ecosim::summary_to_csv({row}));
    std::cout << to_string(cfg.scenario) << ": mean final response rate "
              << row.mean_final_rate << "% over " << row.runs << " run(s)\n";
    return 0;
}

int compare_command(const CommonOptions& opts) {
    std::vector<std::string> names;
    std::stringstream ss(opts.scenarios);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) names.push_back(item);
    }
    if (names.empty()) throw std::invalid_argument("--scenarios must name at least one scenario");

    std::vector<ecosim::SummaryRow> rows;
    for (const auto& name : names) {
        CommonOptions one = opts;
        one.scenario = name;
        ecosim::SimConfig cfg = assemble_config(one);
        const auto result = ecosim::run_scenario(cfg);
        rows.push_back(ecosim::write_scenario_outputs(result, opts.out_dir));
        std::cout << name << ": mean final response rate " << rows.back().mean_final_rate
                  << "% over " << rows.back().runs << " run(s)\n";
    }
    ecosim::write_file(opts.out_dir + "/summary.csv", ecosim::summary_to_csv(rows));
    return 0;
}

int filter_command(const CommonOptions& opts) {
    const auto map = ecosim::FilterMap::load(opts.map_path);
    std::ifstream in(opts.in_path);
    if (!in) throw std::invalid_argument("cannot open input file: " + opts.in_path);
    std::string line;
    while (std::getline(in, line)) {
        const auto begin = line.find_first_not_of(" \t\r\n");
        if (begin == std::string::npos) {
            std::cout << "\n";
            continue;
        }
        if (line[begin] == '[') {
            for (const auto& rendered : map.render(ecosim::parse_request(line))) {
                std::cout << rendered << "\n";
            }
        } else {
            std::cout << map.render(ecosim::parse_description(line)) << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Digital-ecosystem simulator"};
    app.require_subcommand(1);

    CommonOptions opts;

    auto* run = app.add_subcommand("run", "Run one scenario and emit CSV outputs");
    run->add_option("--scenario", opts.scenario, "Scenario name")->required();
    run->add_option("--steps", opts.steps, "Time steps per run");
    run->add_option("--runs", opts.runs, "Number of runs");
    run->add_option("--seed", opts.seed, "Master seed");
    run->add_option("--config", opts.config_path, "Config file (key = value lines)");
    run->add_option("--out", opts.out_dir, "Output directory")->required();

    auto* compare = app.add_subcommand("compare", "Run several scenarios with shared seeds");
    compare->add_option("--scenarios", opts.scenarios, "Comma-separated scenario names")
        ->required();
    compare->add_option("--steps", opts.steps, "Time steps per run");
    compare->add_option("--runs", opts.runs, "Number of runs");
    compare->add_option("--seed", opts.seed, "Master seed");
    compare->add_option("--config", opts.config_path, "Config file (key = value lines)");
    compare->add_option("--out", opts.out_dir, "Output directory")->required();

    auto* filter = app.add_subcommand("filter", "Render numeric descriptions in readable form");
    filter->add_option("--map", opts.map_path, "Filter map file")->required();
    filter->add_option("--in", opts.in_path, "Input file with descriptions/requests")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(run)) return run_command(opts);
        if (app.got_subcommand(compare)) return compare_command(opts);
        if (app.got_subcommand(filter)) return filter_command(opts);
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
