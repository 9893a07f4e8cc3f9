#include "ecosim/recognizer.hpp"

#include <stdexcept>

namespace ecosim {

std::vector<LabelledVariant> build_initial_training_descriptions(
    const SemanticDescription& own, int n_variants, const TrainingSetParams& params, Rng& rng) {
    if (n_variants < 2) throw std::invalid_argument("need at least two variants");
    std::vector<LabelledVariant> out;
    out.reserve(static_cast<std::size_t>(n_variants) + 1);
    out.push_back({own, true});
    for (int i = 0; i < n_variants; ++i) {
        const double target = rng.uniform() * params.target_diff_max;
        SemanticDescription variant = generate_variant(own, target, rng);
        const bool positive = difference(own, variant) < params.positive_threshold;
        out.push_back({std::move(variant), positive});
    }
    return out;
}

std::vector<TrainingExample> build_initial_training_set(const SemanticDescription& own,
                                                        int n_variants,
                                                        const TrainingSetParams& params,
                                                        Rng& rng) {
    const std::size_t width = own.size() * kBitsPerTuple;
    auto labelled = build_initial_training_descriptions(own, n_variants, params, rng);
    std::vector<TrainingExample> set;
    set.reserve(labelled.size());
    for (auto& lv : labelled) {
        set.push_back({encode_input(lv.description, width), lv.positive});
    }
    return set;
}

namespace {

void require_trained(bool trained) {
    if (!trained) throw std::logic_error("recognizer has not been trained");
}

// A training set needs both classes before an SVM can be fitted. The uniform
// target draw makes all-positive sets possible (if vanishingly rare), so keep
// forcing distant variants until a negative shows up.
void ensure_both_classes(std::vector<TrainingExample>& set, const SemanticDescription& own,
                         const TrainingSetParams& params, std::size_t width, Rng& rng) {
    bool has_negative = false;
    for (const auto& e : set) has_negative |= !e.positive;
    int guard = 0;
    while (!has_negative && guard++ < 64) {
        SemanticDescription variant = generate_variant(own, 0.35, rng);
        if (difference(own, variant) >= params.positive_threshold) {
            set.push_back({encode_input(variant, width), false});
            has_negative = true;
        }
    }
    if (!has_negative) throw std::runtime_error("could not synthesise a negative example");
}

}  // namespace

MlpRecognizer::MlpRecognizer(SemanticDescription own, MlpParams params,
                             TrainingSetParams set_params)
    : own_(std::move(own)), params_(params), set_params_(set_params),
      width_(static_cast<int>(own_.size()) * kBitsPerTuple) {
    own_bits_ = encode_input(own_, static_cast<std::size_t>(width_));
}

void MlpRecognizer::train_initial(Rng& rng) {
    set_ = build_initial_training_set(own_, set_params_.n_variants, set_params_, rng);
    // Train to criterion: a run can collapse into an all-negative output
    // where the positive gradient vanishes; reinitialise and try again.
    for (int attempt = 0; attempt < 5; ++attempt) {
        net_ = Mlp<float>(width_, rng);
        net_.train(set_, params_.max_epochs, params_.learning_rate, params_.margin,
                   params_.patience);
        rehearse_own();
        if (net_.forward(own_bits_) >= params_.threshold) break;
    }
    trained_ = true;
}

void MlpRecognizer::rehearse_own() {
    // The own description must stay a positive match after any training pass.
    const TrainingExample own_example{own_bits_, true};
    for (int i = 0; i < 500 && net_.forward(own_bits_) < params_.threshold; ++i) {
        net_.sgd_step(own_example, params_.learning_rate);
    }
}

double MlpRecognizer::score(const SemanticDescription& other) const {
    require_trained(trained_);
    return net_.forward(encode_input(other, static_cast<std::size_t>(width_)));
}

bool MlpRecognizer::is_similar(const SemanticDescription& other) const {
    return score(other) >= params_.threshold;
}

void MlpRecognizer::extend(const SemanticDescription& other, bool visit_success, Rng&) {
    require_trained(trained_);
    set_.push_back({encode_input(other, static_cast<std::size_t>(width_)), visit_success});
    if (set_.size() > static_cast<std::size_t>(set_params_.max_examples)) {
        // Forget the oldest experience first; the own description stays.
        set_.erase(set_.begin() + 1);
    }
    net_.train(set_, params_.extend_epochs, params_.learning_rate, params_.margin,
               params_.patience);
    rehearse_own();
}

std::unique_ptr<Recognizer> MlpRecognizer::clone() const {
    return std::make_unique<MlpRecognizer>(*this);
}

SvmRecognizer::SvmRecognizer(SemanticDescription own, SvmParams params,
                             TrainingSetParams set_params)
    : own_(std::move(own)), params_(params), set_params_(set_params),
      width_(static_cast<int>(own_.size()) * kBitsPerTuple) {
    own_bits_ = encode_input(own_, static_cast<std::size_t>(width_));
}

void SvmRecognizer::train_initial(Rng& rng) {
    set_ = build_initial_training_set(own_, set_params_.n_variants, set_params_, rng);
    ensure_both_classes(set_, own_, set_params_, static_cast<std::size_t>(width_), rng);
    retrain();
    trained_ = true;
}

void SvmRecognizer::retrain() {
    double c = params_.c;
    model_ = smo_train(set_, c, params_.gamma, params_.tol);
    // Train to criterion: the own description must classify positive. A
    // harder error penalty separates it when the default C leaves it inside
    // the margin.
    for (int attempt = 0; attempt < 3 && model_.decision(own_bits_) <= 0.0; ++attempt) {
        c *= 10.0;
        model_ = smo_train(set_, c, params_.gamma, params_.tol);
    }
}

double SvmRecognizer::decision(const SemanticDescription& other) const {
    require_trained(trained_);
    return model_.decision(encode_input(other, static_cast<std::size_t>(width_)));
}

bool SvmRecognizer::is_similar(const SemanticDescription& other) const {
    return decision(other) > 0.0;
}

void SvmRecognizer::extend(const SemanticDescription& other, bool visit_success, Rng&) {
    require_trained(trained_);
    set_.push_back({encode_input(other, static_cast<std::size_t>(width_)), visit_success});
    if (set_.size() > static_cast<std::size_t>(set_params_.max_examples)) {
        set_.erase(set_.begin() + 1);
    }
    retrain();
}

std::unique_ptr<Recognizer> SvmRecognizer::clone() const {
    return std::make_unique<SvmRecognizer>(*this);
}

DistanceRecognizer::DistanceRecognizer(SemanticDescription own, double threshold)
    : own_(std::move(own)), threshold_(threshold) {}

bool DistanceRecognizer::is_similar(const SemanticDescription& other) const {
    return 1.0 - difference(own_, other) >= threshold_;
}

std::unique_ptr<Recognizer> DistanceRecognizer::clone() const {
    return std::make_unique<DistanceRecognizer>(*this);
}

}  // namespace ecosim
