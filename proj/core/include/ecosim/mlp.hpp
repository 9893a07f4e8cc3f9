#pragma once
#include <limits>

#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ecosim/rng.hpp"
#include "ecosim/semantic.hpp"

namespace ecosim {

// Logistic activation, strictly inside (0, 1).
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct TrainingExample {
    BitVector input;
    bool positive = false;
};

// Encodes a description for a recognizer of the given input width:
// canonical bits, zero-padded or truncated.
inline BitVector encode_input(const SemanticDescription& desc, std::size_t width) {
    return canonicalize(desc).resized(width);
}

// Feed-forward perceptron with one hidden layer sized at 1.5x the input
// layer and a single output neuron. Inputs are bit vectors, so the first
// layer is evaluated by accumulating the weight rows of the set bits.
template <class Scalar>
class Mlp {
public:
    Mlp() = default;

    Mlp(int input_width, Rng& rng)
        : input_(input_width),
          hidden_(static_cast<int>((3 * input_width + 1) / 2)),
          w1_(static_cast<std::size_t>(input_) * static_cast<std::size_t>(hidden_)),
          b1_(static_cast<std::size_t>(hidden_)),
          w2_(static_cast<std::size_t>(hidden_)) {
        if (input_width <= 0) throw std::invalid_argument("input width must be positive");
        for (auto& w : w1_) w = init_weight(rng);
        for (auto& w : b1_) w = init_weight(rng);
        for (auto& w : w2_) w = init_weight(rng);
        b2_ = init_weight(rng);
    }

    int input_width() const { return input_; }
    int hidden_width() const { return hidden_; }

    double forward(const BitVector& input) const {
        return forward_impl(input, scratch_hidden_);
    }

    // Online gradient descent, examples in order. An example already inside
    // the margin (positives >= 1 - margin, negatives <= margin) is left
    // alone; training stops once a whole pass leaves every example inside,
    // or earlier when the squared error stops improving (patience epochs
    // without a new best, 0 = run to the margin criterion). Returns epochs
    // used.
    int train(std::span<const TrainingExample> set, int max_epochs, double learning_rate,
              double margin, int patience = 0) {
        if (set.empty()) throw std::invalid_argument("training set must not be empty");
        double best_sse = std::numeric_limits<double>::infinity();
        int stale = 0;
        int epoch = 0;
        for (; epoch < max_epochs; ++epoch) {
            bool all_inside = true;
            double sse = 0.0;
            for (const auto& example : set) {
                const double out = forward_impl(example.input, scratch_hidden_);
                const double err = out - (example.positive ? 1.0 : 0.0);
                sse += err * err;
                if (example.positive ? out >= 1.0 - margin : out <= margin) continue;
                all_inside = false;
                backward(example, out, learning_rate);
            }
            if (all_inside) break;
            if (patience > 0) {
                if (sse < best_sse * (1.0 - 1e-4)) {
                    best_sse = sse;
                    stale = 0;
                } else if (++stale >= patience) {
                    ++epoch;
                    break;
                }
            }
        }
        return epoch;
    }

    void sgd_step(const TrainingExample& example, double learning_rate) {
        const double out = forward_impl(example.input, scratch_hidden_);
        backward(example, out, learning_rate);
    }

    bool all_within_margin(std::span<const TrainingExample> set, double margin) const {
        for (const auto& example : set) {
            const double out = forward(example.input);
            if (example.positive ? out < 1.0 - margin : out > margin) return false;
        }
        return true;
    }

    double mean_squared_error(std::span<const TrainingExample> set) const {
        double sum = 0.0;
        for (const auto& example : set) {
            const double err = forward(example.input) - (example.positive ? 1.0 : 0.0);
            sum += err * err;
        }
        return sum / static_cast<double>(set.size());
    }

    double example_loss(const TrainingExample& example) const {
        const double err = forward(example.input) - (example.positive ? 1.0 : 0.0);
        return 0.5 * err * err;
    }

    // Flat parameter view, ordered w1, b1, w2, b2. Used by gradient checks.
    std::size_t parameter_count() const { return w1_.size() + b1_.size() + w2_.size() + 1; }

    double parameter(std::size_t i) const { return static_cast<double>(*locate(i)); }

    void set_parameter(std::size_t i, double value) {
        *const_cast<Scalar*>(locate(i)) = static_cast<Scalar>(value);
    }

    // Analytic d(loss)/d(parameter) for one example, loss = (out - target)^2 / 2.
    std::vector<double> gradient(const TrainingExample& example) const {
        std::vector<Scalar> hidden;
        const double out = forward_impl(example.input, hidden);
        const double target = example.positive ? 1.0 : 0.0;
        const double g2 = (out - target) * out * (1.0 - out);

        std::vector<double> grad(parameter_count(), 0.0);
        std::vector<double> g1(static_cast<std::size_t>(hidden_));
        for (int j = 0; j < hidden_; ++j) {
            const auto h = static_cast<double>(hidden[static_cast<std::size_t>(j)]);
            g1[static_cast<std::size_t>(j)] =
                g2 * static_cast<double>(w2_[static_cast<std::size_t>(j)]) * h * (1.0 - h);
        }
        for (std::uint32_t i : example.input.ones()) {
            const std::size_t base = static_cast<std::size_t>(i) * static_cast<std::size_t>(hidden_);
            for (int j = 0; j < hidden_; ++j) {
                grad[base + static_cast<std::size_t>(j)] = g1[static_cast<std::size_t>(j)];
            }
        }
        std::size_t cursor = w1_.size();
        for (int j = 0; j < hidden_; ++j) grad[cursor++] = g1[static_cast<std::size_t>(j)];
        for (int j = 0; j < hidden_; ++j) {
            grad[cursor++] = g2 * static_cast<double>(hidden[static_cast<std::size_t>(j)]);
        }
        grad[cursor] = g2;
        return grad;
    }

private:
    static Scalar init_weight(Rng& rng) {
        return static_cast<Scalar>(rng.uniform() - 0.5);
    }

    // Uses the hidden activations already in scratch_hidden_ from the
    // preceding forward pass.
    void backward(const TrainingExample& example, double out, double learning_rate) {
        const double target = example.positive ? 1.0 : 0.0;
        const double g2 = (out - target) * out * (1.0 - out);
        const auto lr = static_cast<Scalar>(learning_rate);

        scratch_g1_.resize(static_cast<std::size_t>(hidden_));
        const auto sg2 = static_cast<Scalar>(g2);
        Scalar* __restrict__ g1 = scratch_g1_.data();
        Scalar* __restrict__ w2 = w2_.data();
        Scalar* __restrict__ b1 = b1_.data();
        const Scalar* __restrict__ hid = scratch_hidden_.data();
        const auto one = static_cast<Scalar>(1);
        for (int j = 0; j < hidden_; ++j) {
            const Scalar h = hid[j];
            g1[j] = sg2 * w2[j] * h * (one - h);
            w2[j] -= lr * sg2 * h;
        }
        b2_ -= lr * sg2;
        for (int j = 0; j < hidden_; ++j) b1[j] -= lr * g1[j];
        const auto& words = example.input.words();
        for (std::size_t w = 0; w < words.size(); ++w) {
            std::uint64_t word = words[w];
            while (word != 0) {
                const auto i = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
                word &= word - 1;
                Scalar* __restrict__ row = &w1_[i * static_cast<std::size_t>(hidden_)];
                for (int j = 0; j < hidden_; ++j) row[j] -= lr * g1[j];
            }
        }
    }

    double forward_impl(const BitVector& input, std::vector<Scalar>& hidden) const {
        if (static_cast<int>(input.size()) != input_) {
            throw std::invalid_argument("input width mismatch: expected " +
                                        std::to_string(input_) + ", got " +
                                        std::to_string(input.size()));
        }
        hidden.assign(b1_.begin(), b1_.end());
        Scalar* __restrict__ acc = hidden.data();
        const auto& words = input.words();
        for (std::size_t w = 0; w < words.size(); ++w) {
            std::uint64_t word = words[w];
            while (word != 0) {
                const auto i = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
                word &= word - 1;
                const Scalar* __restrict__ row = &w1_[i * static_cast<std::size_t>(hidden_)];
                for (int j = 0; j < hidden_; ++j) acc[j] += row[j];
            }
        }
        double z2 = static_cast<double>(b2_);
        const Scalar* __restrict__ w2 = w2_.data();
        for (int j = 0; j < hidden_; ++j) {
            const auto h = static_cast<Scalar>(sigmoid(static_cast<double>(acc[j])));
            acc[j] = h;
            z2 += static_cast<double>(w2[j]) * static_cast<double>(h);
        }
        return sigmoid(z2);
    }

    const Scalar* locate(std::size_t i) const {
        if (i < w1_.size()) return &w1_[i];
        i -= w1_.size();
        if (i < b1_.size()) return &b1_[i];
        i -= b1_.size();
        if (i < w2_.size()) return &w2_[i];
        return &b2_;
    }

    int input_ = 0;
    int hidden_ = 0;
    std::vector<Scalar> w1_;  // row-major [input][hidden]
    std::vector<Scalar> b1_;
    std::vector<Scalar> w2_;
    Scalar b2_{};
    mutable std::vector<Scalar> scratch_hidden_;
    std::vector<Scalar> scratch_g1_;
};

}  // namespace ecosim
