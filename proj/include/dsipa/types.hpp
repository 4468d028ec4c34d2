#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dsipa {

// Probability components are floored at this value before renormalization so
// downstream log-space distances stay finite.
inline constexpr double kProbabilityFloor = 1e-6;

enum class Label { Human, Llm };

std::string to_string(Label label);

// Case-insensitive parse of "human" / "llm". Throws std::invalid_argument.
Label label_from_string(const std::string& text);

struct TextSample {
    std::string id;
    std::string text;
    std::optional<Label> label;
    std::optional<std::string> domain;
    std::optional<std::string> source_model;
};

// A k-component probability vector over sentiment classes. Component order
// for k=3 is [negative, neutral, positive]. Instances are only produced by
// validate_vector, so every component is >= kProbabilityFloor / 2 and the
// components sum to 1 within 1e-9.
class SentimentVector {
public:
    const std::vector<double>& components() const { return components_; }
    std::size_t k() const { return components_.size(); }
    double operator[](std::size_t i) const { return components_[i]; }

    bool operator==(const SentimentVector& other) const {
        return components_ == other.components_;
    }

private:
    explicit SentimentVector(std::vector<double> components)
        : components_(std::move(components)) {}
    std::vector<double> components_;

    friend SentimentVector validate_vector(const std::vector<double>& components);
};

// Floors every component at kProbabilityFloor, then renormalizes to sum 1.
// Throws std::invalid_argument on empty input, non-finite or negative
// components, or an all-zero vector.
SentimentVector validate_vector(const std::vector<double>& components);

struct PromptVector {
    std::string prompt_id;
    SentimentVector vector;
};

// Sentiment feature of one text together with the features of its rewrites
// (and optionally their round-trip transforms). All vectors share the same k.
struct SentimentProfile {
    SentimentVector original;
    std::vector<PromptVector> rewrites;
    std::vector<PromptVector> roundtrips;
};

enum class MetricKind { Sdc, Sdp };

std::string to_string(MetricKind kind);
MetricKind metric_kind_from_string(const std::string& text);

struct DivergenceReport {
    std::vector<double> per_prompt_l1;   // nats
    std::vector<double> per_prompt_l2;   // nats; empty unless roundtrips scored
    double sdc = 0.0;
    std::optional<double> sdp;
    double dx = 0.0;
    MetricKind metric_kind = MetricKind::Sdc;
    // Diagnostic: log sigma(x) - mean_i log sigma(x'_i), per component.
    std::vector<double> mean_log_ratio;
};

struct Verdict {
    std::string sample_id;
    Label predicted = Label::Human;
    double dx = 0.0;
    double threshold = 0.0;
};

struct InversePair {
    std::string forward;
    std::string backward;
};

struct PromptSet {
    std::vector<std::string> rewrite_prompts;
    std::string sentiment_prompt;
    std::vector<InversePair> inverse_pairs;
};

// Throws std::invalid_argument when rewrite_prompts is empty or any inverse
// pair has an empty member.
void validate_prompt_set(const PromptSet& prompts);

}  // namespace dsipa
