#include "ecosim/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ecosim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10f", value);
    return buf;
}

int parse_int(const std::string& value) {
    std::size_t used = 0;
    const int out = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("not an integer: " + value);
    return out;
}

double parse_double(const std::string& value) {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("not a number: " + value);
    return out;
}

bool parse_bool(const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::invalid_argument("not a boolean: " + value);
}

std::uint64_t parse_u64(const std::string& value) {
    std::size_t used = 0;
    const std::uint64_t out = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("not an integer: " + value);
    return out;
}

const char* kind_name(MigrationKind kind) {
    switch (kind) {
        case MigrationKind::passive: return "passive";
        case MigrationKind::targeted: return "targeted";
        case MigrationKind::control: return "control";
    }
    return "unknown";
}

}  // namespace

void apply_config_setting(SimConfig& cfg, const std::string& key, const std::string& value) {
    using Setter = std::function<void(SimConfig&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"scenario", [](SimConfig& c, const std::string& v) { c.scenario = scenario_from_string(v); }},
        {"n_users", [](SimConfig& c, const std::string& v) { c.n_users = parse_int(v); }},
        {"steps", [](SimConfig& c, const std::string& v) { c.steps = parse_int(v); }},
        {"runs", [](SimConfig& c, const std::string& v) { c.runs = parse_int(v); }},
        {"seed", [](SimConfig& c, const std::string& v) { c.seed = parse_u64(v); }},
        {"communities", [](SimConfig& c, const std::string& v) { c.communities = parse_int(v); }},
        {"templates_per_community",
         [](SimConfig& c, const std::string& v) { c.templates_per_community = parse_int(v); }},
        {"service_types",
         [](SimConfig& c, const std::string& v) { c.service_types = parse_int(v); }},
        {"template_parts_min",
         [](SimConfig& c, const std::string& v) { c.template_parts_min = parse_int(v); }},
        {"template_parts_max",
         [](SimConfig& c, const std::string& v) { c.template_parts_max = parse_int(v); }},
        {"id_pool", [](SimConfig& c, const std::string& v) { c.id_pool = parse_int(v); }},
        {"value_jitter", [](SimConfig& c, const std::string& v) { c.value_jitter = parse_int(v); }},
        {"low_value_bias",
         [](SimConfig& c, const std::string& v) { c.low_value_bias = parse_double(v); }},
        {"user_niche_bias",
         [](SimConfig& c, const std::string& v) { c.user_niche_bias = parse_double(v); }},
        {"part_change_prob",
         [](SimConfig& c, const std::string& v) { c.part_change_prob = parse_double(v); }},
        {"agents_per_user",
         [](SimConfig& c, const std::string& v) { c.agents_per_user = parse_int(v); }},
        {"initial_own_fraction",
         [](SimConfig& c, const std::string& v) { c.initial_own_fraction = parse_double(v); }},
        {"deploy_every", [](SimConfig& c, const std::string& v) { c.deploy_every = parse_int(v); }},
        {"counter_init", [](SimConfig& c, const std::string& v) { c.counter_init = parse_int(v); }},
        {"interact_k", [](SimConfig& c, const std::string& v) { c.interact_k = parse_int(v); }},
        {"visit_window", [](SimConfig& c, const std::string& v) { c.visit_window = parse_int(v); }},
        {"usage_success_threshold",
         [](SimConfig& c, const std::string& v) { c.usage_success_threshold = parse_double(v); }},
        {"stub_recognizer",
         [](SimConfig& c, const std::string& v) { c.stub_recognizer = parse_bool(v); }},
        {"pool_cap",
         [](SimConfig& c, const std::string& v) { c.pool_cap = static_cast<std::size_t>(parse_u64(v)); }},
        {"init_degree", [](SimConfig& c, const std::string& v) { c.network.degree = parse_int(v); }},
        {"p_init", [](SimConfig& c, const std::string& v) { c.network.p_init = parse_double(v); }},
        {"p_min", [](SimConfig& c, const std::string& v) { c.network.p_min = parse_double(v); }},
        {"p_max", [](SimConfig& c, const std::string& v) { c.network.p_max = parse_double(v); }},
        {"delivery_decay",
         [](SimConfig& c, const std::string& v) { c.network.delivery_decay = parse_double(v); }},
        {"hebbian_eta", [](SimConfig& c, const std::string& v) { c.network.eta = parse_double(v); }},
        {"base_size", [](SimConfig& c, const std::string& v) { c.evolution.base_size = parse_int(v); }},
        {"size_coeff",
         [](SimConfig& c, const std::string& v) { c.evolution.size_coeff = parse_double(v); }},
        {"crossover_fraction",
         [](SimConfig& c, const std::string& v) { c.evolution.crossover_fraction = parse_double(v); }},
        {"mutation_fraction",
         [](SimConfig& c, const std::string& v) { c.evolution.mutation_fraction = parse_double(v); }},
        {"max_generations",
         [](SimConfig& c, const std::string& v) { c.evolution.max_generations = parse_int(v); }},
        {"id_mismatch_penalty",
         [](SimConfig& c, const std::string& v) { c.evolution.id_mismatch_penalty = parse_double(v); }},
        {"stored_seed_threshold",
         [](SimConfig& c, const std::string& v) { c.evolution.stored_seed_threshold = parse_double(v); }},
        {"seed_length_max",
         [](SimConfig& c, const std::string& v) { c.evolution.seed_length_max = parse_int(v); }},
        {"mlp_learning_rate",
         [](SimConfig& c, const std::string& v) { c.mlp.learning_rate = parse_double(v); }},
        {"mlp_max_epochs",
         [](SimConfig& c, const std::string& v) { c.mlp.max_epochs = parse_int(v); }},
        {"mlp_extend_epochs",
         [](SimConfig& c, const std::string& v) { c.mlp.extend_epochs = parse_int(v); }},
        {"mlp_patience",
         [](SimConfig& c, const std::string& v) { c.mlp.patience = parse_int(v); }},
        {"mlp_margin", [](SimConfig& c, const std::string& v) { c.mlp.margin = parse_double(v); }},
        {"mlp_threshold",
         [](SimConfig& c, const std::string& v) { c.mlp.threshold = parse_double(v); }},
        {"svm_c", [](SimConfig& c, const std::string& v) { c.svm.c = parse_double(v); }},
        {"svm_gamma", [](SimConfig& c, const std::string& v) { c.svm.gamma = parse_double(v); }},
        {"svm_tol", [](SimConfig& c, const std::string& v) { c.svm.tol = parse_double(v); }},
        {"max_training_examples",
         [](SimConfig& c, const std::string& v) { c.training_set.max_examples = parse_int(v); }},
        {"n_variants",
         [](SimConfig& c, const std::string& v) { c.training_set.n_variants = parse_int(v); }},
        {"variant_target_max",
         [](SimConfig& c, const std::string& v) { c.training_set.target_diff_max = parse_double(v); }},
        {"positive_threshold",
         [](SimConfig& c, const std::string& v) { c.training_set.positive_threshold = parse_double(v); }},
        {"distance_threshold",
         [](SimConfig& c, const std::string& v) { c.distance_threshold = parse_double(v); }},
    };
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("unknown config key: " + key);
    try {
        it->second(cfg, value);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + key + ": " + value);
    }
}

SimConfig load_config_file(const std::string& path, SimConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected `key = value`");
        }
        try {
            apply_config_setting(base, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
        } catch (const std::invalid_argument& err) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " +
                                        err.what());
        }
    }
    return base;
}

std::string series_to_csv(const RunSeries& series) {
    std::string out = "step,user,match_percent,generations\n";
    for (const auto& record : series.steps) {
        out += std::to_string(record.step);
        out += ',';
        out += std::to_string(record.user);
        out += ',';
        out += format_double(record.match_percent);
        out += ',';
        out += std::to_string(record.generations);
        out += '\n';
    }
    return out;
}

std::string events_to_csv(const RunSeries& series) {
    std::string out = "step,agent,source,dest,kind\n";
    for (const auto& event : series.events) {
        out += std::to_string(event.step);
        out += ',';
        out += std::to_string(event.agent);
        out += ',';
        out += std::to_string(event.source);
        out += ',';
        out += std::to_string(event.dest);
        out += ',';
        out += kind_name(event.kind);
        out += '\n';
    }
    return out;
}

std::string histogram_to_csv(const std::vector<std::pair<int, long>>& histogram) {
    std::string out = "bucket_start,poor_count\n";
    for (const auto& [start, count] : histogram) {
        out += std::to_string(start);
        out += ',';
        out += std::to_string(count);
        out += '\n';
    }
    return out;
}

std::string topology_to_csv(const HabitatNetwork& net) {
    std::string out = "from,to,p_forward,p_backward\n";
    for (const auto& c : net.connections()) {
        out += std::to_string(c.from);
        out += ',';
        out += std::to_string(c.to);
        out += ',';
        out += format_double(c.p_forward);
        out += ',';
        out += format_double(c.p_backward);
        out += '\n';
    }
    return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "scenario,mean_final_rate,std_dev,runs\n";
    for (const auto& row : rows) {
        out += row.scenario;
        out += ',';
        out += format_double(row.mean_final_rate);
        out += ',';
        out += format_double(row.std_dev);
        out += ',';
        out += std::to_string(row.runs);
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << contents;
    if (!out) throw std::runtime_error("failed writing file: " + path);
}

SummaryRow write_scenario_outputs(const ScenarioResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string name = to_string(result.config.scenario);

    std::vector<long> poor_totals;
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        const auto& run = result.runs[r];
        const std::string tag = name + "_" + std::to_string(r);
        write_file(out_dir + "/series_" + tag + ".csv", series_to_csv(run));
        write_file(out_dir + "/migration_events_" + tag + ".csv", events_to_csv(run));
        if (r < result.topologies.size()) {
            write_file(out_dir + "/topology_" + tag + ".csv", result.topologies[r]);
        }
        if (run.steps.size() >= 100) {
            const auto histogram = poor_match_histogram(run.steps);
            if (poor_totals.empty()) poor_totals.assign(histogram.size(), 0);
            for (std::size_t b = 0; b < histogram.size() && b < poor_totals.size(); ++b) {
                poor_totals[b] += histogram[b].second;
            }
        }
    }
    if (!poor_totals.empty()) {
        std::vector<std::pair<int, long>> combined;
        combined.reserve(poor_totals.size());
        for (std::size_t b = 0; b < poor_totals.size(); ++b) {
            combined.emplace_back(static_cast<int>(b) * 100 + 1, poor_totals[b]);
        }
        write_file(out_dir + "/histogram_" + name + ".csv", histogram_to_csv(combined));
    }

    SummaryRow row;
    row.scenario = name;
    row.runs = static_cast<int>(result.runs.size());
    if (result.runs.size() >= 2) {
        const auto stats = aggregate_runs(result);
        row.mean_final_rate = stats.mean_final_rate;
        row.std_dev = stats.std_dev;
    } else if (result.runs.size() == 1) {
        const int n = static_cast<int>(result.runs.front().steps.size());
        row.mean_final_rate = response_rate(result.runs.front().steps, std::max(1, n - 99), n);
        row.std_dev = 0.0;
    }
    return row;
}

}  // namespace ecosim
