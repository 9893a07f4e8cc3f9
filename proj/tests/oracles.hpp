// Independent reference implementations used to check the production code.
// Everything here is deliberately written along different lines than the
// library: map-based scans, exhaustive enumeration, finite differences.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <span>
#include <vector>

#include "ecosim/agent.hpp"
#include "ecosim/evolution.hpp"
#include "ecosim/habitat.hpp"
#include "ecosim/mlp.hpp"
#include "ecosim/semantic.hpp"

namespace oracles {

// Eq-style fitness evaluated from scratch: group sequence attributes by id,
// then for each request tuple scan the whole map.
inline double reference_fitness(const ecosim::AgentSequence& sequence,
                                std::span<const ecosim::AttributeTuple> request,
                                double id_penalty = 100.0) {
    std::map<int, std::vector<int>> by_id;
    for (const auto& member : sequence.members()) {
        for (const auto& tuple : member->description.tuples()) {
            by_id[tuple.id].push_back(tuple.value);
        }
    }
    double total = 0.0;
    for (const auto& r : request) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [id, values] : by_id) {
            for (int value : values) {
                const double d = id_penalty * std::abs(r.id - id) + std::abs(r.value - value);
                best = std::min(best, d);
            }
        }
        total += best;
    }
    return 1.0 / (1.0 + total);
}

// Central finite difference of an MLP's per-example loss with respect to one
// flat parameter.
template <class Scalar>
double fd_gradient(ecosim::Mlp<Scalar>& net, const ecosim::TrainingExample& example,
                   std::size_t parameter, double eps = 1e-5) {
    const double saved = net.parameter(parameter);
    net.set_parameter(parameter, saved + eps);
    const double up = net.example_loss(example);
    net.set_parameter(parameter, saved - eps);
    const double down = net.example_loss(example);
    net.set_parameter(parameter, saved);
    return (up - down) / (2.0 * eps);
}

// Exact SVM dual optimum by active-set enumeration: every assignment of the
// examples to {lower bound, upper bound, interior} is tried; interior
// variables and the equality multiplier come from a dense linear solve.
struct BruteDual {
    std::vector<double> alpha;
    double objective = -std::numeric_limits<double>::infinity();
    bool found = false;
};

inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        }
        if (std::abs(a[pivot][col]) < 1e-10) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col) continue;
            const double factor = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return true;
}

inline BruteDual brute_force_dual(const std::vector<std::vector<double>>& kernel,
                                  const std::vector<double>& labels, double c) {
    const std::size_t n = labels.size();
    BruteDual best;
    std::vector<int> state(n, 0);  // 0 = at 0, 1 = at C, 2 = interior

    const auto objective = [&](const std::vector<double>& alpha) {
        double linear = 0.0;
        double quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            linear += alpha[i];
            for (std::size_t j = 0; j < n; ++j) {
                quad += alpha[i] * alpha[j] * labels[i] * labels[j] * kernel[i][j];
            }
        }
        return linear - 0.5 * quad;
    };

    std::size_t assignments = 1;
    for (std::size_t i = 0; i < n; ++i) assignments *= 3;
    for (std::size_t code = 0; code < assignments; ++code) {
        std::size_t rest = code;
        std::vector<std::size_t> interior;
        std::vector<double> alpha(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            state[i] = static_cast<int>(rest % 3);
            rest /= 3;
            if (state[i] == 1) alpha[i] = c;
            if (state[i] == 2) interior.push_back(i);
        }
        if (interior.empty()) {
            double balance = 0.0;
            for (std::size_t i = 0; i < n; ++i) balance += labels[i] * alpha[i];
            if (std::abs(balance) > 1e-12) continue;
        } else {
            // Stationarity for interior i:
            //   sum_j y_i y_j K_ij alpha_j + y_i beta = 1  (j interior unknown)
            // plus the balance constraint.
            const std::size_t m = interior.size();
            std::vector<std::vector<double>> a(m + 1, std::vector<double>(m + 1, 0.0));
            std::vector<double> b(m + 1, 0.0);
            for (std::size_t row = 0; row < m; ++row) {
                const std::size_t i = interior[row];
                double rhs = 1.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (state[j] == 1) rhs -= labels[i] * labels[j] * kernel[i][j] * c;
                }
                for (std::size_t col = 0; col < m; ++col) {
                    const std::size_t j = interior[col];
                    a[row][col] = labels[i] * labels[j] * kernel[i][j];
                }
                a[row][m] = labels[i];
                b[row] = rhs;
            }
            double fixed = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (state[j] == 1) fixed += labels[j] * c;
            }
            for (std::size_t col = 0; col < m; ++col) a[m][col] = labels[interior[col]];
            a[m][m] = 0.0;
            b[m] = -fixed;
            if (!solve_dense(a, b)) continue;
            bool feasible = true;
            for (std::size_t row = 0; row < m; ++row) {
                if (b[row] < -1e-9 || b[row] > c + 1e-9) {
                    feasible = false;
                    break;
                }
                alpha[interior[row]] = std::clamp(b[row], 0.0, c);
            }
            if (!feasible) continue;
        }
        const double value = objective(alpha);
        if (value > best.objective) {
            best.objective = value;
            best.alpha = alpha;
            best.found = true;
        }
    }
    return best;
}

// Mean local clustering coefficient recomputed by triangle counting over an
// adjacency matrix.
inline double brute_clustering(const ecosim::HabitatNetwork& net) {
    const int n = net.size();
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n),
                                       std::vector<bool>(static_cast<std::size_t>(n), false));
    for (const auto& c : net.connections()) {
        adj[static_cast<std::size_t>(c.from)][static_cast<std::size_t>(c.to)] = true;
        adj[static_cast<std::size_t>(c.to)][static_cast<std::size_t>(c.from)] = true;
    }
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
        std::vector<int> nbrs;
        for (int u = 0; u < n; ++u) {
            if (adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)]) nbrs.push_back(u);
        }
        if (nbrs.size() < 2) continue;
        long triangles = 0;
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
                if (adj[static_cast<std::size_t>(nbrs[i])][static_cast<std::size_t>(nbrs[j])]) {
                    ++triangles;
                }
            }
        }
        total += 2.0 * static_cast<double>(triangles) /
                 (static_cast<double>(nbrs.size()) * static_cast<double>(nbrs.size() - 1));
    }
    return total / static_cast<double>(n);
}

// Best possible raw fitness over every agent-sequence up to max_length from
// the pool (order and repetition do not change the attribute set's minima,
// so combinations with repetition suffice; we enumerate them recursively).
inline double exhaustive_best_fitness(std::span<const ecosim::AgentPtr> pool,
                                      std::span<const ecosim::AttributeTuple> request,
                                      std::size_t max_length) {
    double best = 0.0;
    std::vector<ecosim::AgentPtr> members;
    const std::function<void(std::size_t)> recurse = [&](std::size_t first) {
        if (!members.empty()) {
            best = std::max(best, ecosim::sequence_fitness(ecosim::AgentSequence(members),
                                                           request));
        }
        if (members.size() == max_length) return;
        for (std::size_t i = first; i < pool.size(); ++i) {
            members.push_back(pool[i]);
            recurse(i);
            members.pop_back();
        }
    };
    recurse(0);
    return best;
}

}  // namespace oracles
