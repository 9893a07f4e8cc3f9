#pragma once

#include <string>
#include <vector>

#include "ecosim/simulation.hpp"

namespace ecosim {

// Applies one `key = value` setting; throws std::invalid_argument for
// unknown keys or unparsable values.
void apply_config_setting(SimConfig& config, const std::string& key, const std::string& value);

// Line-oriented `key = value` file; blank lines and lines starting with `#`
// are skipped.
SimConfig load_config_file(const std::string& path, SimConfig base);

std::string series_to_csv(const RunSeries& series);
std::string events_to_csv(const RunSeries& series);
std::string histogram_to_csv(const std::vector<std::pair<int, long>>& histogram);
std::string topology_to_csv(const HabitatNetwork& net);

struct SummaryRow {
    std::string scenario;
    double mean_final_rate = 0.0;
    double std_dev = 0.0;
    int runs = 0;
};

std::string summary_to_csv(const std::vector<SummaryRow>& rows);

void write_file(const std::string& path, const std::string& contents);

// Emits series, events, histogram, topology snapshots and a summary row for
// one completed scenario into `out_dir`. Returns the summary row.
SummaryRow write_scenario_outputs(const ScenarioResult& result, const std::string& out_dir);

}  // namespace ecosim
