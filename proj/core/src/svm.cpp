#include "ecosim/svm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ecosim {

double rbf_kernel(const BitVector& u, const BitVector& v, double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("rbf gamma must be positive");
    return std::exp(-gamma * static_cast<double>(u.hamming(v)));
}

double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("rbf gamma must be positive");
    if (u.size() != v.size()) {
        throw std::invalid_argument("rbf kernel length mismatch: " + std::to_string(u.size()) +
                                    " vs " + std::to_string(v.size()));
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

double SvmModel::decision(const BitVector& x) const {
    double sum = bias;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (alpha[i] > 0.0) {
            sum += alpha[i] * labels[i] * rbf_kernel(inputs[i], x, gamma);
        }
    }
    return sum;
}

double SvmModel::dual_objective() const {
    const std::size_t n = inputs.size();
    double linear = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        linear += alpha[i];
        if (alpha[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (alpha[j] == 0.0) continue;
            quad += alpha[i] * alpha[j] * labels[i] * labels[j] *
                    rbf_kernel(inputs[i], inputs[j], gamma);
        }
    }
    return linear - 0.5 * quad;
}

namespace {

// Platt's SMO over a cached kernel matrix. Training sets here are small
// (tens of examples), so the dense cache is cheap.
class SmoSolver {
public:
    SmoSolver(std::span<const TrainingExample> set, double c, double gamma, double tol)
        : n_(set.size()), c_(c), tol_(tol), kernel_(n_ * n_), alpha_(n_, 0.0),
          error_(n_, 0.0), labels_(n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            labels_[i] = set[i].positive ? 1.0 : -1.0;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            kernel_[i * n_ + i] = 1.0;
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double k = rbf_kernel(set[i].input, set[j].input, gamma);
                kernel_[i * n_ + j] = k;
                kernel_[j * n_ + i] = k;
            }
        }
        for (std::size_t i = 0; i < n_; ++i) error_[i] = -labels_[i];
    }

    void solve() {
        std::size_t changed = 0;
        bool examine_all = true;
        std::size_t sweeps = 0;
        const std::size_t max_sweeps = 100000;
        while ((changed > 0 || examine_all) && sweeps++ < max_sweeps) {
            changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (examine_all || (alpha_[i] > 0.0 && alpha_[i] < c_)) {
                    changed += examine(i);
                }
            }
            if (examine_all)
                examine_all = false;
            else if (changed == 0)
                examine_all = true;
        }
    }

    const std::vector<double>& alpha() const { return alpha_; }
    const std::vector<double>& labels() const { return labels_; }
    double bias() const { return bias_; }

private:
    double output(std::size_t i) const { return error_[i] + labels_[i]; }

    std::size_t examine(std::size_t i2) {
        const double y2 = labels_[i2];
        const double a2 = alpha_[i2];
        const double e2 = error_[i2];
        const double r2 = e2 * y2;
        if (!((r2 < -tol_ && a2 < c_) || (r2 > tol_ && a2 > 0.0))) return 0;

        // Second-choice heuristic: largest |E1 - E2| over non-bound points.
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] > 0.0 && alpha_[i] < c_) {
                const double gap = std::abs(error_[i] - e2);
                if (gap > best_gap) {
                    best_gap = gap;
                    best = i;
                }
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;

        // Fall back to scanning non-bound points, then everything. Round-robin
        // start keeps the solver deterministic.
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (scan_ + k) % n_;
            if (alpha_[i1] > 0.0 && alpha_[i1] < c_ && take_step(i1, i2)) {
                scan_ = i1 + 1;
                return 1;
            }
        }
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (scan_ + k) % n_;
            if (take_step(i1, i2)) {
                scan_ = i1 + 1;
                return 1;
            }
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1];
        const double a2 = alpha_[i2];
        const double y1 = labels_[i1];
        const double y2 = labels_[i2];
        const double e1 = error_[i1];
        const double e2 = error_[i2];
        const double s = y1 * y2;

        double low;
        double high;
        if (s < 0.0) {
            low = std::max(0.0, a2 - a1);
            high = std::min(c_, c_ + a2 - a1);
        } else {
            low = std::max(0.0, a1 + a2 - c_);
            high = std::min(c_, a1 + a2);
        }
        if (low >= high) return false;

        const double k11 = kernel_[i1 * n_ + i1];
        const double k12 = kernel_[i1 * n_ + i2];
        const double k22 = kernel_[i2 * n_ + i2];
        const double eta = k11 + k22 - 2.0 * k12;

        double a2_new;
        if (eta > 0.0) {
            a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, low, high);
        } else {
            // Flat direction: pick the better endpoint of the feasible box.
            const double f1 = y1 * (e1 + bias_) - a1 * k11 - s * a2 * k12;
            const double f2 = y2 * (e2 + bias_) - s * a1 * k12 - a2 * k22;
            const double l1 = a1 + s * (a2 - low);
            const double h1 = a1 + s * (a2 - high);
            const double obj_low = l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11 +
                                   0.5 * low * low * k22 + s * low * l1 * k12;
            const double obj_high = h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11 +
                                    0.5 * high * high * k22 + s * high * h1 * k12;
            if (obj_low < obj_high - 1e-12)
                a2_new = low;
            else if (obj_low > obj_high + 1e-12)
                a2_new = high;
            else
                return false;
        }
        if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;

        const double a1_new = a1 + s * (a2 - a2_new);

        const double b1 = e1 + y1 * (a1_new - a1) * k11 + y2 * (a2_new - a2) * k12 + bias_;
        const double b2 = e2 + y1 * (a1_new - a1) * k12 + y2 * (a2_new - a2) * k22 + bias_;
        double bias_new;
        if (a1_new > 0.0 && a1_new < c_)
            bias_new = b1;
        else if (a2_new > 0.0 && a2_new < c_)
            bias_new = b2;
        else
            bias_new = 0.5 * (b1 + b2);

        for (std::size_t i = 0; i < n_; ++i) {
            error_[i] += y1 * (a1_new - a1) * kernel_[i1 * n_ + i] +
                         y2 * (a2_new - a2) * kernel_[i2 * n_ + i] + (bias_ - bias_new);
        }
        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        bias_ = bias_new;
        return true;
    }

    std::size_t n_;
    double c_;
    double tol_;
    std::vector<double> kernel_;
    std::vector<double> alpha_;
    std::vector<double> error_;
    std::vector<double> labels_;
    double bias_ = 0.0;
    std::size_t scan_ = 0;
};

}  // namespace

SvmModel smo_train(std::span<const TrainingExample> set, double c, double gamma, double tol) {
    if (set.empty()) throw std::invalid_argument("training set must not be empty");
    bool has_positive = false;
    bool has_negative = false;
    for (const auto& example : set) {
        (example.positive ? has_positive : has_negative) = true;
    }
    if (!has_positive || !has_negative) {
        throw std::invalid_argument("degenerate training set: both classes are required");
    }
    const std::size_t width = set.front().input.size();
    for (const auto& example : set) {
        if (example.input.size() != width) {
            throw std::invalid_argument("training inputs must share one width");
        }
    }
    if (gamma <= 0.0) gamma = 16.0 / static_cast<double>(width);

    SmoSolver solver(set, c, gamma, tol);
    solver.solve();

    SvmModel model;
    model.inputs.reserve(set.size());
    for (const auto& example : set) model.inputs.push_back(example.input);
    model.labels = solver.labels();
    model.alpha = solver.alpha();
    model.gamma = gamma;
    model.c = c;
    model.tolerance = tol;
    // SMO maintains errors around an explicit threshold; translate to the
    // f(x) = sum + bias convention used by decision().
    model.bias = -solver.bias();
    return model;
}

}  // namespace ecosim
