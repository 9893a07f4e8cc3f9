#pragma once

#include <span>
#include <vector>

#include "ecosim/mlp.hpp"
#include "ecosim/semantic.hpp"

namespace ecosim {

// Gaussian kernel exp(-gamma * ||u - v||^2). For 0/1 inputs the squared
// distance is the Hamming distance.
double rbf_kernel(const BitVector& u, const BitVector& v, double gamma);
double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma);

// Maximum-margin classifier trained by sequential minimal optimisation.
// Stores the full training set with its dual coefficients; the decision
// function only visits points with alpha > 0.
struct SvmModel {
    std::vector<BitVector> inputs;
    std::vector<double> labels;  // +1 / -1
    std::vector<double> alpha;
    double bias = 0.0;
    double gamma = 0.0;
    double c = 1.0;
    double tolerance = 1e-3;

    double decision(const BitVector& x) const;
    double dual_objective() const;
};

// Solves the dual problem with pairwise analytic steps until no example
// violates the KKT conditions beyond `tol`. Requires at least one example of
// each class and throws std::invalid_argument otherwise. gamma <= 0 selects
// the 1/width default.
SvmModel smo_train(std::span<const TrainingExample> set, double c, double gamma, double tol);

}  // namespace ecosim
