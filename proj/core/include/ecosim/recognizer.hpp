#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ecosim/mlp.hpp"
#include "ecosim/rng.hpp"
#include "ecosim/semantic.hpp"
#include "ecosim/svm.hpp"

namespace ecosim {

struct MlpParams {
    double learning_rate = 0.3;
    int max_epochs = 500;
    int extend_epochs = 4;
    int patience = 100;  // epochs without error improvement before stopping
    double margin = 0.1;
    double threshold = 0.9;
};

struct SvmParams {
    double c = 3.0;
    double gamma = 0.0;  // <= 0 selects 16 / input_width
    double tol = 1e-3;
};

struct TrainingSetParams {
    int n_variants = 20;
    double target_diff_max = 0.3;
    double positive_threshold = 0.1;  // measured difference below this is a positive
    int max_examples = 48;            // oldest experience drops out beyond this
};

struct LabelledVariant {
    SemanticDescription description;
    bool positive = false;
};

// Own description first (always positive), then n_variants variants with
// target differences drawn uniformly from [0, target_diff_max]; labels come
// from the measured difference against the 10% rule.
std::vector<LabelledVariant> build_initial_training_descriptions(
    const SemanticDescription& own, int n_variants, const TrainingSetParams& params, Rng& rng);

std::vector<TrainingExample> build_initial_training_set(const SemanticDescription& own,
                                                        int n_variants,
                                                        const TrainingSetParams& params,
                                                        Rng& rng);

enum class RecognizerKind { mlp, svm, distance, stub };

// Similarity-recognition component embedded in an agent. One instance is
// owned per agent; copies made for migration share state until retrained.
class Recognizer {
public:
    virtual ~Recognizer() = default;

    virtual RecognizerKind kind() const = 0;
    virtual bool trained() const = 0;

    // Throws std::logic_error when the recognizer has not been trained.
    virtual bool is_similar(const SemanticDescription& other) const = 0;

    // Appends one experience example (label = visit_success) and retrains
    // within a bounded budget. No-op for recognizers without training sets.
    virtual void extend(const SemanticDescription& other, bool visit_success, Rng& rng) = 0;

    virtual std::unique_ptr<Recognizer> clone() const = 0;
    virtual std::size_t training_set_size() const { return 0; }
};

class MlpRecognizer final : public Recognizer {
public:
    MlpRecognizer(SemanticDescription own, MlpParams params, TrainingSetParams set_params);

    void train_initial(Rng& rng);

    RecognizerKind kind() const override { return RecognizerKind::mlp; }
    bool trained() const override { return trained_; }
    bool is_similar(const SemanticDescription& other) const override;
    void extend(const SemanticDescription& other, bool visit_success, Rng& rng) override;
    std::unique_ptr<Recognizer> clone() const override;
    std::size_t training_set_size() const override { return set_.size(); }

    double score(const SemanticDescription& other) const;
    const SemanticDescription& own() const { return own_; }
    int input_width() const { return width_; }

private:
    void rehearse_own();

    SemanticDescription own_;
    MlpParams params_;
    TrainingSetParams set_params_;
    int width_ = 0;
    Mlp<float> net_;
    std::vector<TrainingExample> set_;
    BitVector own_bits_;
    bool trained_ = false;
};

class SvmRecognizer final : public Recognizer {
public:
    SvmRecognizer(SemanticDescription own, SvmParams params, TrainingSetParams set_params);

    void train_initial(Rng& rng);

    RecognizerKind kind() const override { return RecognizerKind::svm; }
    bool trained() const override { return trained_; }
    bool is_similar(const SemanticDescription& other) const override;
    void extend(const SemanticDescription& other, bool visit_success, Rng& rng) override;
    std::unique_ptr<Recognizer> clone() const override;
    std::size_t training_set_size() const override { return set_.size(); }

    double decision(const SemanticDescription& other) const;
    const SvmModel& model() const { return model_; }
    int input_width() const { return width_; }

private:
    void retrain();

    SemanticDescription own_;
    SvmParams params_;
    TrainingSetParams set_params_;
    int width_ = 0;
    std::vector<TrainingExample> set_;
    SvmModel model_;
    BitVector own_bits_;
    bool trained_ = false;
};

// Pattern-recognition control: similarity is 1 - difference(own, other)
// against a fixed threshold. Stateless apart from configuration.
class DistanceRecognizer final : public Recognizer {
public:
    DistanceRecognizer(SemanticDescription own, double threshold);

    RecognizerKind kind() const override { return RecognizerKind::distance; }
    bool trained() const override { return true; }
    bool is_similar(const SemanticDescription& other) const override;
    void extend(const SemanticDescription&, bool, Rng&) override {}
    std::unique_ptr<Recognizer> clone() const override;

private:
    SemanticDescription own_;
    double threshold_;
};

// Validation control that never reports similarity.
class StubRecognizer final : public Recognizer {
public:
    RecognizerKind kind() const override { return RecognizerKind::stub; }
    bool trained() const override { return true; }
    bool is_similar(const SemanticDescription&) const override { return false; }
    void extend(const SemanticDescription&, bool, Rng&) override {}
    std::unique_ptr<Recognizer> clone() const override {
        return std::make_unique<StubRecognizer>();
    }
};

}  // namespace ecosim
