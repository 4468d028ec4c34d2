#include "dsipa/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace dsipa {

namespace {

std::string lowercase(const std::string& text) {
    std::string out = text;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string to_string(Label label) {
    return label == Label::Human ? "human" : "llm";
}

Label label_from_string(const std::string& text) {
    const std::string lower = lowercase(text);
    if (lower == "human") return Label::Human;
    if (lower == "llm") return Label::Llm;
    throw std::invalid_argument("unknown label '" + text + "' (expected \"human\" or \"llm\")");
}

std::string to_string(MetricKind kind) {
    return kind == MetricKind::Sdc ? "sdc" : "sdp";
}

MetricKind metric_kind_from_string(const std::string& text) {
    const std::string lower = lowercase(text);
    if (lower == "sdc") return MetricKind::Sdc;
    if (lower == "sdp") return MetricKind::Sdp;
    throw std::invalid_argument("unknown metric '" + text + "' (expected \"sdc\" or \"sdp\")");
}

SentimentVector validate_vector(const std::vector<double>& components) {
    if (components.empty()) {
        throw std::invalid_argument("sentiment vector must not be empty");
    }
    double raw_sum = 0.0;
    for (double c : components) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("sentiment vector has a non-finite component");
        }
        if (c < 0.0) {
            throw std::invalid_argument("sentiment vector has a negative component");
        }
        raw_sum += c;
    }
    if (raw_sum == 0.0) {
        throw std::invalid_argument("sentiment vector is all zeros");
    }
    std::vector<double> floored(components.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        floored[i] = std::max(components[i], kProbabilityFloor);
        sum += floored[i];
    }
    for (double& c : floored) c /= sum;
    return SentimentVector(std::move(floored));
}

void validate_prompt_set(const PromptSet& prompts) {
    if (prompts.rewrite_prompts.empty()) {
        throw std::invalid_argument("prompt set has no rewrite prompts");
    }
    for (const std::string& p : prompts.rewrite_prompts) {
        if (p.empty()) throw std::invalid_argument("prompt set has an empty rewrite prompt");
    }
    for (const InversePair& pair : prompts.inverse_pairs) {
        if (pair.forward.empty() || pair.backward.empty()) {
            throw std::invalid_argument("inverse pair has an empty member");
        }
    }
}

}  // namespace dsipa
