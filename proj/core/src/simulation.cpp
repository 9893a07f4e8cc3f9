#include "ecosim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ecosim/io.hpp"

namespace ecosim {

namespace {

// Independent random streams per run. Keeping every concern on its own
// stream means optional machinery (interactions, recognizer training) can
// run or not run without disturbing the request/evolution/migration draws —
// which is what makes a stubbed targeted run replay the baseline exactly.
enum StreamTag : std::uint64_t {
    kRunTag = 0x5eed,
    kTopologyStream = 1,
    kModelStream = 2,
    kRequestStream = 3,
    kPassiveStream = 4,
    kInteractStream = 5,
    kControlStream = 6,
    kRecognizerStream = 7,
    kEvolveStream = 8,
    kDeployStream = 9,
};

std::uint64_t run_master(const SimConfig& cfg, int run_index) {
    return derive_seed(cfg.seed, {kRunTag, static_cast<std::uint64_t>(run_index)});
}

}  // namespace

std::string to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::baseline: return "baseline";
        case Scenario::migration_control: return "migration-control";
        case Scenario::pattern_control: return "pattern-control";
        case Scenario::targeted_nn: return "targeted-nn";
        case Scenario::targeted_svm: return "targeted-svm";
    }
    return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "baseline") return Scenario::baseline;
    if (name == "migration-control") return Scenario::migration_control;
    if (name == "pattern-control") return Scenario::pattern_control;
    if (name == "targeted-nn") return Scenario::targeted_nn;
    if (name == "targeted-svm") return Scenario::targeted_svm;
    throw std::invalid_argument("unknown scenario: " + name);
}

void SimConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (n_users < 2) fail("n_users must be at least 2");
    if (steps < 1) fail("steps must be at least 1");
    if (runs < 1) fail("runs must be at least 1");
    if (communities < 1 || communities > n_users) fail("communities must be in [1, n_users]");
    if (templates_per_community < 1) fail("templates_per_community must be positive");
    if (service_types < 1) fail("service_types must be positive");
    if (template_parts_min < kRequestPartsMin || template_parts_max > kRequestPartsMax ||
        template_parts_min > template_parts_max) {
        fail("template part bounds must satisfy 2 <= min <= max <= 8");
    }
    if (id_pool < kAgentTuplesMax || id_pool > kAttributeMax) {
        fail("id_pool must be in [6, 100]");
    }
    if (communities * id_pool > kAttributeMax) {
        fail("communities x id_pool must fit the attribute-id range (<= 100)");
    }
    if (value_jitter < 0 || value_jitter > 99) fail("value_jitter must be in [0, 99]");
    if (low_value_bias < 0.0 || low_value_bias > 1.0) fail("low_value_bias must be in [0, 1]");
    if (part_change_prob < 0.0 || part_change_prob > 1.0) {
        fail("part_change_prob must be in [0, 1]");
    }
    if (user_niche_bias < 0.0 || user_niche_bias > 1.0) {
        fail("user_niche_bias must be in [0, 1]");
    }
    if (agents_per_user < 1) fail("agents_per_user must be positive");
    if (initial_own_fraction < 0.0 || initial_own_fraction > 1.0) {
        fail("initial_own_fraction must be in [0, 1]");
    }
    if (deploy_every < 1) fail("deploy_every must be positive");
    if (counter_init < 0) fail("counter_init must be non-negative");
    if (interact_k < 0) fail("interact_k must be non-negative");
    if (visit_window < 1) fail("visit_window must be positive");
    if (usage_success_threshold < 0.0 || usage_success_threshold > 1.0) {
        fail("usage_success_threshold must be in [0, 1]");
    }
    if (network.degree < 1 || network.degree >= n_users) {
        fail("init_degree must be in [1, n_users)");
    }
    if (!(network.p_min > 0.0 && network.p_min <= network.p_init &&
          network.p_init <= network.p_max && network.p_max < 1.0)) {
        fail("probability bounds must satisfy 0 < p_min <= p_init <= p_max < 1");
    }
    if (network.eta <= 0.0 || network.eta >= 1.0) fail("hebbian_eta must be in (0, 1)");
    if (network.delivery_decay < 0.0 || network.delivery_decay > 1.0) {
        fail("delivery_decay must be in [0, 1]");
    }
    if (evolution.base_size < 1) fail("base_size must be positive");
    if (evolution.size_coeff < 0.0) fail("size_coeff must be non-negative");
    if (evolution.crossover_fraction < 0.0 || evolution.crossover_fraction > 1.0 ||
        evolution.mutation_fraction < 0.0 || evolution.mutation_fraction > 1.0) {
        fail("operator fractions must be in [0, 1]");
    }
    if (evolution.max_generations < 1) fail("max_generations must be positive");
    if (evolution.id_mismatch_penalty <= 0.0) fail("id_mismatch_penalty must be positive");
    if (evolution.stored_seed_threshold < 0.0) fail("stored_seed_threshold must be >= 0");
    if (evolution.seed_length_max < 1) fail("seed_length_max must be positive");
    if (mlp.learning_rate <= 0.0) fail("mlp_learning_rate must be positive");
    if (mlp.patience < 0) fail("mlp_patience must be non-negative");
    if (mlp.max_epochs < 1 || mlp.extend_epochs < 1) fail("mlp epochs must be positive");
    if (mlp.margin <= 0.0 || mlp.margin >= 0.5) fail("mlp_margin must be in (0, 0.5)");
    if (mlp.threshold <= 0.0 || mlp.threshold >= 1.0) fail("mlp_threshold must be in (0, 1)");
    if (svm.c <= 0.0) fail("svm_c must be positive");
    if (svm.tol <= 0.0) fail("svm_tol must be positive");
    if (training_set.n_variants < 2) fail("n_variants must be at least 2");
    if (training_set.max_examples < training_set.n_variants + 1) {
        fail("max_training_examples must cover the initial set");
    }
    if (training_set.target_diff_max <= 0.0 || training_set.target_diff_max > 1.0) {
        fail("variant_target_max must be in (0, 1]");
    }
    if (training_set.positive_threshold <= 0.0 || training_set.positive_threshold > 1.0) {
        fail("positive_threshold must be in (0, 1]");
    }
    if (distance_threshold <= 0.0 || distance_threshold > 1.0) {
        fail("distance_threshold must be in (0, 1]");
    }
}

double response_rate(std::span<const StepRecord> series, int first_step, int last_step) {
    if (first_step < 1 || last_step > static_cast<int>(series.size()) ||
        first_step > last_step) {
        throw std::invalid_argument("response-rate window is empty or out of range");
    }
    double sum = 0.0;
    for (int s = first_step; s <= last_step; ++s) {
        sum += series[static_cast<std::size_t>(s - 1)].match_percent;
    }
    return sum / static_cast<double>(last_step - first_step + 1);
}

std::vector<std::pair<int, long>> poor_match_histogram(std::span<const StepRecord> series) {
    if (series.size() < 100) {
        throw std::invalid_argument("histogram needs a series of at least 100 steps");
    }
    std::vector<std::pair<int, long>> buckets;
    for (std::size_t start = 0; start < series.size(); start += 100) {
        const std::size_t end = std::min(start + 100, series.size());
        long poor = 0;
        for (std::size_t i = start; i < end; ++i) {
            if (series[i].match_percent < 50.0) ++poor;
        }
        buckets.emplace_back(static_cast<int>(start) + 1, poor);
    }
    return buckets;
}

AggregateStats aggregate_runs(const ScenarioResult& result) {
    if (result.runs.size() < 2) {
        throw std::invalid_argument("aggregation needs at least two runs");
    }
    AggregateStats stats;
    std::vector<double> final_rates;
    final_rates.reserve(result.runs.size());
    for (const auto& run : result.runs) {
        const int n = static_cast<int>(run.steps.size());
        final_rates.push_back(response_rate(run.steps, std::max(1, n - 99), n));
    }
    stats.mean_final_rate = std::accumulate(final_rates.begin(), final_rates.end(), 0.0) /
                            static_cast<double>(final_rates.size());
    double variance = 0.0;
    for (double rate : final_rates) {
        variance += (rate - stats.mean_final_rate) * (rate - stats.mean_final_rate);
    }
    stats.std_dev = std::sqrt(variance / static_cast<double>(final_rates.size() - 1));

    const std::size_t steps = result.runs.front().steps.size();
    stats.mean_curve.assign(steps, 0.0);
    for (const auto& run : result.runs) {
        for (std::size_t t = 0; t < steps; ++t) {
            stats.mean_curve[t] += run.steps[t].match_percent;
        }
    }
    for (auto& v : stats.mean_curve) v /= static_cast<double>(result.runs.size());
    return stats;
}

Simulation::Simulation(const SimConfig& config, int run_index)
    : cfg_(config),
      run_index_(run_index),
      run_seed_(run_master(config, run_index)),
      requests_rng_(derive_seed(run_seed_, {kRequestStream})),
      deploy_rng_(derive_seed(run_seed_, {kDeployStream})),
      passive_rng_(derive_seed(run_seed_, {kPassiveStream})),
      interact_rng_(derive_seed(run_seed_, {kInteractStream})),
      control_rng_(derive_seed(run_seed_, {kControlStream})) {
    cfg_.validate();

    Rng topology_rng(derive_seed(run_seed_, {kTopologyStream}));
    net_ = HabitatNetwork::random(cfg_.n_users, cfg_.network, topology_rng);

    communities_.resize(static_cast<std::size_t>(cfg_.communities));
    user_community_.resize(static_cast<std::size_t>(cfg_.n_users));
    for (int u = 0; u < cfg_.n_users; ++u) {
        const int c = u % cfg_.communities;
        communities_[static_cast<std::size_t>(c)].users.push_back(u);
        user_community_[static_cast<std::size_t>(u)] = c;
    }
    request_counts_.assign(static_cast<std::size_t>(cfg_.n_users), 0);

    Rng model_rng(derive_seed(run_seed_, {kModelStream}));
    seed_templates(model_rng);
    seed_initial_agents(model_rng);
}

void Simulation::seed_templates(Rng& rng) {
    // Each community offers a handful of service types; its templates compose
    // those types, the way one travel community's requests keep re-using
    // flight and hotel services with different values.
    int community_index = 0;
    for (auto& community : communities_) {
        // Every community describes its services in its own attribute
        // vocabulary: a disjoint block of identifiers. The shared semantic
        // filter maps one community's numbers at a time.
        const int id_base = community_index++ * cfg_.id_pool;
        community.part_pool.reserve(static_cast<std::size_t>(cfg_.service_types));
        for (int s = 0; s < cfg_.service_types; ++s) {
            const int n_tuples = rng.range(kAgentTuplesMin, 4);
            std::vector<int> ids(static_cast<std::size_t>(cfg_.id_pool));
            for (int i = 0; i < cfg_.id_pool; ++i) ids[static_cast<std::size_t>(i)] = id_base + i + 1;
            rng.shuffle(ids.begin(), ids.end());
            std::vector<AttributeTuple> tuples;
            tuples.reserve(static_cast<std::size_t>(n_tuples));
            for (int i = 0; i < n_tuples; ++i) {
                // Business attributes lean on small scales (tiers, counts,
                // costs in units of ten), so bias part values low.
                const int value = rng.chance(cfg_.low_value_bias)
                                      ? rng.range(1, 6)
                                      : rng.range(kAttributeMin, kAttributeMax);
                tuples.push_back({ids[static_cast<std::size_t>(i)], value});
            }
            community.part_pool.push_back(SemanticDescription(std::move(tuples)));
        }
        community.templates.reserve(static_cast<std::size_t>(cfg_.templates_per_community));
        for (int t = 0; t < cfg_.templates_per_community; ++t) {
            UserRequest request;
            const int parts = rng.range(cfg_.template_parts_min, cfg_.template_parts_max);
            request.parts.reserve(static_cast<std::size_t>(parts));
            for (int p = 0; p < parts; ++p) {
                request.parts.push_back(community.part_pool[rng.index(community.part_pool.size())]);
            }
            community.templates.push_back(std::move(request));
        }
    }
}

void Simulation::seed_initial_agents(Rng& rng) {
    // Users start with a few services of their own plus whatever the wider
    // ecosystem scattered their way; migration later sorts out who hosts
    // what.
    for (int u = 0; u < cfg_.n_users; ++u) {
        for (int a = 0; a < cfg_.agents_per_user; ++a) {
            const bool own = rng.chance(cfg_.initial_own_fraction);
            const int community = own ? user_community_[static_cast<std::size_t>(u)]
                                      : static_cast<int>(rng.index(communities_.size()));
            auto agent = make_agent(draw_service_description(community, own ? u : -1, rng));
            deploy_agent(net_.habitat(u), agent, 0);
            // Deployment includes distribution to the connected habitats. No
            // scenario machinery runs during seeding; step events start at 1.
            const auto spread = passive_migrate(net_, *agent, u, 0, next_agent_id_,
                                                passive_rng_);
            counters_.passive_copies += static_cast<long>(spread.size());
        }
    }
}

SemanticDescription Simulation::jitter_part(const SemanticDescription& part, Rng& rng) const {
    std::vector<AttributeTuple> tuples = part.tuples();
    for (auto& t : tuples) {
        if (cfg_.value_jitter > 0) {
            t.value = std::clamp(t.value + rng.range(-cfg_.value_jitter, cfg_.value_jitter),
                                 kAttributeMin, kAttributeMax);
        }
    }
    return SemanticDescription(std::move(tuples));
}

std::size_t Simulation::preferred_template(const Community& community, int user) const {
    for (std::size_t i = 0; i < community.users.size(); ++i) {
        if (community.users[i] == user) return i % community.templates.size();
    }
    return 0;
}

SemanticDescription Simulation::draw_service_description(int community, int user, Rng& rng) const {
    const auto& c = communities_[static_cast<std::size_t>(community)];
    // Deployed services serve the provider's niche most of the time.
    if (user >= 0 && rng.chance(cfg_.user_niche_bias)) {
        const auto& tmpl = c.templates[preferred_template(c, user)];
        return jitter_part(tmpl.parts[rng.index(tmpl.parts.size())], rng);
    }
    const auto& part = c.part_pool[rng.index(c.part_pool.size())];
    return jitter_part(part, rng);
}

UserRequest Simulation::generate_request(const Community& community, int user, Rng& rng) const {
    // Users specialise: most of their requests revisit their preferred
    // template, the rest roam the community's repertoire.
    std::size_t pick = rng.index(community.templates.size());
    const bool niche = user >= 0 && rng.chance(cfg_.user_niche_bias);
    if (niche) {
        pick = preferred_template(community, user);
    }
    const auto& tmpl = community.templates[pick];
    UserRequest request;
    request.parts.reserve(tmpl.parts.size());
    for (const auto& part : tmpl.parts) request.parts.push_back(jitter_part(part, rng));

    if (rng.chance(cfg_.part_change_prob)) {
        const bool drop = rng.chance(0.5);
        if (drop && static_cast<int>(request.parts.size()) > kRequestPartsMin) {
            request.parts.erase(request.parts.begin() +
                                static_cast<std::ptrdiff_t>(rng.index(request.parts.size())));
        } else if (static_cast<int>(request.parts.size()) < kRequestPartsMax) {
            const auto& extra = tmpl.parts[rng.index(tmpl.parts.size())];
            request.parts.insert(request.parts.begin() +
                                     static_cast<std::ptrdiff_t>(
                                         rng.index(request.parts.size() + 1)),
                                 jitter_part(extra, rng));
        }
    }
    return request;
}

bool Simulation::uses_recognizers() const {
    return cfg_.scenario == Scenario::pattern_control ||
           cfg_.scenario == Scenario::targeted_nn || cfg_.scenario == Scenario::targeted_svm;
}

bool Simulation::learning_recognizers() const {
    if (cfg_.stub_recognizer) return false;
    return cfg_.scenario == Scenario::targeted_nn || cfg_.scenario == Scenario::targeted_svm;
}

AgentPtr Simulation::make_agent(SemanticDescription desc) {
    auto agent = std::make_shared<Agent>();
    agent->id = next_agent_id_++;
    agent->migration_counter = cfg_.counter_init;
    if (uses_recognizers()) {
        if (cfg_.stub_recognizer) {
            agent->recognizer = std::make_shared<StubRecognizer>();
        } else if (cfg_.scenario == Scenario::pattern_control) {
            agent->recognizer =
                std::make_shared<DistanceRecognizer>(desc, cfg_.distance_threshold);
        } else {
            Rng rng(derive_seed(run_seed_, {kRecognizerStream, agent->id}));
            if (cfg_.scenario == Scenario::targeted_nn) {
                auto recognizer =
                    std::make_shared<MlpRecognizer>(desc, cfg_.mlp, cfg_.training_set);
                recognizer->train_initial(rng);
                agent->recognizer = std::move(recognizer);
            } else {
                auto recognizer =
                    std::make_shared<SvmRecognizer>(desc, cfg_.svm, cfg_.training_set);
                recognizer->train_initial(rng);
                agent->recognizer = std::move(recognizer);
            }
        }
    }
    agent->description = std::move(desc);
    return agent;
}

void Simulation::run() {
    for (int s = 0; s < cfg_.steps; ++s) step();
}

void Simulation::step() {
    ++step_;
    const int user = static_cast<int>(requests_rng_.index(static_cast<std::size_t>(cfg_.n_users)));
    const auto& community = communities_[static_cast<std::size_t>(user_community_[
        static_cast<std::size_t>(user)])];
    const UserRequest request = generate_request(community, user, requests_rng_);
    const auto flat = flatten(request);
    const auto centroid = request_centroid(request);

    Habitat& habitat = net_.habitat(user);
    std::vector<AgentSequence> stored;
    for (const auto& solution : habitat.solutions) {
        if (difference(std::span<const AttributeTuple>(centroid),
                       std::span<const AttributeTuple>(solution.centroid)) <
            cfg_.evolution.stored_seed_threshold) {
            stored.push_back(solution.sequence);
        }
    }

    Rng evolve_rng(derive_seed(run_seed_, {kEvolveStream, static_cast<std::uint64_t>(step_)}));
    EvolveResult result = evolve(flat, habitat.pool, stored, cfg_.evolution, evolve_rng);

    series_.steps.push_back({static_cast<int>(step_), user, 100.0 * result.best_fitness,
                             result.generations});
    habitat.solutions.push_back({centroid, result.best});

    // The user always executes the response; members earn budget, usage is
    // logged and the delivering connections learn from the outcome.
    const bool success = result.best_fitness >= cfg_.usage_success_threshold;
    std::vector<std::uint64_t> counted;
    std::vector<AgentPtr> executed;
    for (const auto& member : result.best.members()) {
        if (std::find(counted.begin(), counted.end(), member->id) != counted.end()) continue;
        counted.push_back(member->id);
        on_execution(*member);
        // Members seeded from a stored solution may have been displaced from
        // the pool since; only residents feed the usage log.
        if (habitat.hosts(member->id)) {
            record_usage(net_, habitat, *member, success);
            if (success) note_success(*member, habitat.id);
            executed.push_back(member);
        }
    }

    auto arrivals = passive_migrate(net_, result.best, centroid, user, step_, next_agent_id_,
                                    passive_rng_);
    counters_.passive_copies += static_cast<long>(arrivals.size());
    for (const auto& arrival : arrivals) {
        series_.events.push_back({static_cast<int>(step_), arrival.agent->id, arrival.source,
                                  arrival.habitat, MigrationKind::passive});
    }
    // Execution is a migration opportunity for the members that just earned
    // budget, on top of the passive spread of the response itself.
    for (auto& member : executed) {
        arrivals.push_back({member, user, -1, MigrationKind::passive});
    }
    process_arrivals(std::move(arrivals));

    auto& count = request_counts_[static_cast<std::size_t>(user)];
    count += 1;
    if (count % cfg_.deploy_every == 0) deploy_new_agent(user);

    expire_visits();
}

void Simulation::deploy_new_agent(int user) {
    auto agent = make_agent(draw_service_description(
        user_community_[static_cast<std::size_t>(user)], user, deploy_rng_));
    deploy_agent(net_.habitat(user), agent, step_);
    counters_.deployments += 1;
    auto arrivals = passive_migrate(net_, *agent, user, step_, next_agent_id_, passive_rng_);
    counters_.passive_copies += static_cast<long>(arrivals.size());
    for (const auto& arrival : arrivals) {
        series_.events.push_back({static_cast<int>(step_), arrival.agent->id, arrival.source,
                                  arrival.habitat, MigrationKind::passive});
    }
    arrivals.push_back({agent, user, -1, MigrationKind::passive});
    process_arrivals(std::move(arrivals));
}

void Simulation::process_arrivals(std::vector<ArrivalEvent> arrivals) {
    std::deque<ArrivalEvent> queue(std::make_move_iterator(arrivals.begin()),
                                   std::make_move_iterator(arrivals.end()));
    while (!queue.empty()) {
        ArrivalEvent event = std::move(queue.front());
        queue.pop_front();
        handle_arrival(event, queue);
    }
}

void Simulation::handle_arrival(const ArrivalEvent& event, std::deque<ArrivalEvent>& queue) {
    Habitat& habitat = net_.habitat(event.habitat);
    enforce_pool_cap(habitat);

    // Arrivals with migration budget interact to find somewhere to go;
    // arrivals carrying successful experience interact so that residents can
    // learn from it. Anything else has nothing to trade.
    if (event.agent->migration_counter < 1) {
        if (cfg_.scenario == Scenario::migration_control) return;
        bool has_marks = false;
        for (const auto& record : event.agent->history) {
            if (record.successes >= 1) {
                has_marks = true;
                break;
            }
        }
        if (!has_marks) return;
    }
    counters_.opportunities += 1;

    if (cfg_.scenario == Scenario::migration_control) {
        Agent& agent = *event.agent;
        auto copy = random_migrate_control(agent, net_, event.habitat, step_, next_agent_id_,
                                           control_rng_);
        if (copy) {
            const int dest = copy->history.back().habitat;
            counters_.control_copies += 1;
            series_.events.push_back({static_cast<int>(step_), agent.id, event.habitat, dest,
                                      MigrationKind::control});
            queue.push_back({std::move(copy), dest, event.habitat, MigrationKind::control});
        }
        return;
    }
    if (!uses_recognizers()) return;

    Agent& arriver = *event.agent;
    if (!arriver.recognizer) return;

    // Up to K one-on-one partners, sampled without replacement. Mutually
    // similar pairs trade the successful stops from their histories; both
    // sides bank what they learn.
    std::vector<std::size_t> indices;
    indices.reserve(habitat.pool.size());
    for (std::size_t i = 0; i < habitat.pool.size(); ++i) {
        if (habitat.pool[i].get() != &arriver) indices.push_back(i);
    }
    const std::size_t partners = std::min(indices.size(),
                                          static_cast<std::size_t>(cfg_.interact_k));
    for (std::size_t pick = 0; pick < partners; ++pick) {
        const std::size_t swap_with = pick + interact_rng_.index(indices.size() - pick);
        std::swap(indices[pick], indices[swap_with]);
        Agent& resident = *habitat.pool[indices[pick]];
        if (!resident.recognizer) continue;

        counters_.interactions += 1;
        const auto exchange = exchange_histories(arriver, resident);
        if (!exchange) continue;
        counters_.mutual_similar += 1;
        remember_candidates(arriver, exchange->for_arriver, resident, step_);
        remember_candidates(resident, exchange->for_resident, arriver, step_);
    }

    // Budget spent means exploring the most promising habitat acquired so
    // far, one exploration per opportunity.
    if (arriver.migration_counter < 1) return;
    auto niche = take_most_promising(arriver);
    if (!niche) return;
    counters_.with_candidates += 1;
    auto copy = targeted_migrate(arriver, net_.habitat(niche->habitat), event.habitat, step_,
                                 next_agent_id_);
    if (copy) {
        counters_.targeted_copies += 1;
        series_.events.push_back({static_cast<int>(step_), arriver.id, event.habitat,
                                  niche->habitat, MigrationKind::targeted});
        if (learning_recognizers()) {
            register_visit(copy, niche->habitat, niche->sharer);
        }
        queue.push_back({std::move(copy), niche->habitat, event.habitat,
                         MigrationKind::targeted});
    }
}

void Simulation::register_visit(AgentPtr copy, int habitat, const SemanticDescription& partner) {
    PendingVisit visit;
    visit.agent_id = copy->id;
    visit.agent = std::move(copy);
    visit.habitat = habitat;
    visit.partner = partner;
    visit.deadline = step_ + cfg_.visit_window;
    pending_visits_.push_back(std::move(visit));
}

void Simulation::note_success(const Agent& agent, int habitat) {
    for (auto& visit : pending_visits_) {
        if (!visit.resolved && visit.agent_id == agent.id && visit.habitat == habitat) {
            resolve_visit(visit, true);
        }
    }
}

void Simulation::resolve_visit(PendingVisit& visit, bool success) {
    visit.resolved = true;
    (success ? counters_.visit_successes : counters_.visit_failures) += 1;
    Rng rng(derive_seed(run_seed_, {kRecognizerStream, visit.agent_id,
                                    static_cast<std::uint64_t>(step_)}));
    visit.agent->learn(visit.partner, success, rng);
}

void Simulation::expire_visits() {
    while (!pending_visits_.empty() && pending_visits_.front().deadline <= step_) {
        auto& visit = pending_visits_.front();
        if (!visit.resolved) resolve_visit(visit, false);
        pending_visits_.pop_front();
    }
}

void Simulation::enforce_pool_cap(Habitat& habitat) {
    if (cfg_.pool_cap == 0) return;
    // Hosting capacity is finite. Agents that have proved useful here keep
    // their places; the rest make way oldest-first, so heavy inflow shortens
    // every newcomer's chance to prove itself. Stored solutions must keep
    // resolving inside the habitat, so solutions referencing an evicted
    // agent go too.
    while (habitat.pool.size() > cfg_.pool_cap) {
        auto victim = habitat.pool.end();
        for (auto it = habitat.pool.begin(); it != habitat.pool.end(); ++it) {
            const auto usage = habitat.usage.find((*it)->id);
            if (usage == habitat.usage.end() || usage->second.successes == 0) {
                victim = it;
                break;
            }
        }
        if (victim == habitat.pool.end()) victim = habitat.pool.begin();
        const std::uint64_t evicted = (*victim)->id;
        habitat.member_ids.erase(evicted);
        habitat.pool.erase(victim);
        std::erase_if(habitat.solutions, [&](const StoredSolution& solution) {
            for (const auto& member : solution.sequence.members()) {
                if (member->id == evicted) return true;
            }
            return false;
        });
    }
}

RunSeries run_simulation(const SimConfig& config, int run_index) {
    Simulation sim(config, run_index);
    sim.run();
    return sim.series();
}

ScenarioResult run_scenario(const SimConfig& config) {
    config.validate();
    ScenarioResult result;
    result.config = config;
    result.runs.reserve(static_cast<std::size_t>(config.runs));
    result.topologies.reserve(static_cast<std::size_t>(config.runs));
    for (int r = 0; r < config.runs; ++r) {
        Simulation sim(config, r);
        sim.run();
        result.runs.push_back(sim.series());
        result.topologies.push_back(topology_to_csv(sim.network()));
    }
    return result;
}

}  // namespace ecosim
