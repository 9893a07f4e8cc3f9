#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "ecosim/habitat.hpp"
#include "ecosim/migration.hpp"
#include "ecosim/recognizer.hpp"
#include "ecosim/rng.hpp"
#include "ecosim/semantic.hpp"

namespace ecosim {

enum class Scenario { baseline, migration_control, pattern_control, targeted_nn, targeted_svm };

std::string to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& name);

struct SimConfig {
    Scenario scenario = Scenario::baseline;
    int n_users = 100;
    int steps = 1000;
    int runs = 30;
    std::uint64_t seed = 1;

    // User-base model.
    int communities = 10;
    int templates_per_community = 3;
    int service_types = 1;     // distinct part types shared within a community
    int template_parts_min = 2;
    int template_parts_max = 2;
    int id_pool = 6;           // attribute-id universe for generated services
    int value_jitter = 5;      // +/- on each tuple value per request
    double part_change_prob = 0.1;
    double user_niche_bias = 0.9;  // share of a user's requests drawn from their preferred template
    double low_value_bias = 1.0;  // probability a template value is drawn from [1, 10]
    int agents_per_user = 5;
    double initial_own_fraction = 0.1;  // share of initial services from the user's own community
    int deploy_every = 3;      // new agent after this many requests

    // Targeted migration.
    int counter_init = 3;
    int interact_k = 10;
    int visit_window = 50;
    double usage_success_threshold = 0.5;
    bool stub_recognizer = false;

    std::size_t pool_cap = 120;  // habitat capacity; guests evicted oldest-first (0 = unlimited)

    NetworkParams network;
    EvolutionParams evolution;
    MlpParams mlp;
    SvmParams svm;
    TrainingSetParams training_set;
    double distance_threshold = 0.9;

    // Desk-scale preset: a deeper generation budget than the engine default
    // drives each population much closer to its pool's ceiling, which is
    // what lets pool quality differences show up in the response rate, and
    // connection wear is enabled so that fruitless deliveries lose ground.
    SimConfig() {
        evolution.max_generations = 200;
        network.delivery_decay = 0.25;
    }

    void validate() const;  // throws std::invalid_argument
};

struct StepRecord {
    int step = 0;  // 1-based
    int user = 0;
    double match_percent = 0.0;  // 100 x raw fitness of the executed sequence
    int generations = 0;
};

struct MigrationEvent {
    int step = 0;
    std::uint64_t agent = 0;
    int source = -1;
    int dest = -1;
    MigrationKind kind = MigrationKind::passive;
};

struct RunSeries {
    std::vector<StepRecord> steps;
    std::vector<MigrationEvent> events;
};

// Bookkeeping totals for audits and diagnostics.
struct SimCounters {
    long deployments = 0;
    long passive_copies = 0;
    long targeted_copies = 0;
    long control_copies = 0;
    long opportunities = 0;
    long interactions = 0;
    long mutual_similar = 0;
    long with_candidates = 0;
    long visit_successes = 0;
    long visit_failures = 0;
};

// A community's service types and the request templates composed from them;
// member users perturb the templates per request.
struct Community {
    std::vector<int> users;
    std::vector<SemanticDescription> part_pool;
    std::vector<UserRequest> templates;
};

// Mean match percent over the inclusive 1-based step window.
double response_rate(std::span<const StepRecord> series, int first_step, int last_step);

// Count of steps scoring below 50% per 100-step bucket; bucket starts are
// 1-based (1, 101, 201, ...).
std::vector<std::pair<int, long>> poor_match_histogram(std::span<const StepRecord> series);

struct ScenarioResult {
    SimConfig config;
    std::vector<RunSeries> runs;
    std::vector<std::string> topologies;  // final edge-list snapshot per run
};

struct AggregateStats {
    double mean_final_rate = 0.0;  // over the last 100 steps of each run
    double std_dev = 0.0;          // sample standard deviation across runs
    std::vector<double> mean_curve;
};

AggregateStats aggregate_runs(const ScenarioResult& result);

// One simulation run: a habitat network serving one user base under one
// scenario. Deterministic in (config, run_index).
class Simulation {
public:
    Simulation(const SimConfig& config, int run_index);

    void run();
    void step();

    const RunSeries& series() const { return series_; }
    const HabitatNetwork& network() const { return net_; }
    const std::vector<Community>& communities() const { return communities_; }
    const SimCounters& counters() const { return counters_; }
    long current_step() const { return step_; }
    std::uint64_t agents_created() const { return next_agent_id_; }

    UserRequest generate_request(const Community& community, Rng& rng) const {
        return generate_request(community, -1, rng);
    }
    UserRequest generate_request(const Community& community, int user, Rng& rng) const;

private:
    struct PendingVisit {
        std::uint64_t agent_id = 0;
        AgentPtr agent;
        int habitat = -1;
        SemanticDescription partner;
        long deadline = 0;
        bool resolved = false;
    };

    void seed_templates(Rng& rng);
    void seed_initial_agents(Rng& rng);
    SemanticDescription jitter_part(const SemanticDescription& part, Rng& rng) const;
    std::size_t preferred_template(const Community& community, int user) const;
    SemanticDescription draw_service_description(int community, int user, Rng& rng) const;
    AgentPtr make_agent(SemanticDescription desc);
    bool uses_recognizers() const;
    bool learning_recognizers() const;
    void deploy_new_agent(int user);
    void process_arrivals(std::vector<ArrivalEvent> arrivals);
    void handle_arrival(const ArrivalEvent& event, std::deque<ArrivalEvent>& queue);
    void register_visit(AgentPtr copy, int habitat, const SemanticDescription& partner);
    void resolve_visit(PendingVisit& visit, bool success);
    void note_success(const Agent& agent, int habitat);
    void expire_visits();
    void enforce_pool_cap(Habitat& habitat);

    SimConfig cfg_;
    int run_index_ = 0;
    std::uint64_t run_seed_ = 0;
    HabitatNetwork net_;
    std::vector<Community> communities_;
    std::vector<int> user_community_;
    std::vector<int> request_counts_;
    std::uint64_t next_agent_id_ = 1;
    long step_ = 0;
    RunSeries series_;
    SimCounters counters_;
    Rng requests_rng_;
    Rng deploy_rng_;
    Rng passive_rng_;
    Rng interact_rng_;
    Rng control_rng_;
    std::deque<PendingVisit> pending_visits_;
};

RunSeries run_simulation(const SimConfig& config, int run_index);
ScenarioResult run_scenario(const SimConfig& config);

}  // namespace ecosim
