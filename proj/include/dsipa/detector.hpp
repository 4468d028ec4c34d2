#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dsipa/gateway.hpp"
#include "dsipa/sentiment.hpp"
#include "dsipa/transform.hpp"
#include "dsipa/types.hpp"

namespace dsipa {

struct PipelineConfig {
    PromptSet prompts;
    MetricKind metric_kind = MetricKind::Sdc;
    double epsilon = 0.0;
    std::string rewrite_backend = "lexicon-strip";
    std::string scorer_backend = "lexicon";
    int n_rewrites = 5;
    bool offline = true;
};

// Throws when n_rewrites is outside [1, prompt count] or the prompt set is
// invalid; sdp additionally requires at least one inverse pair.
void validate_config(const PipelineConfig& cfg);

struct DetectionResult {
    Verdict verdict;
    DivergenceReport report;
};

// Runs the per-sample pipeline: score the original, rewrite under the first
// n_rewrites prompts in order, score each rewrite (and, for sdp, the
// roundtrip of each rewrite cycling through the inverse pairs), aggregate and
// threshold. Backend failures abort the sample with the prompt index named.
DetectionResult detect(const TextSample& sample, const PipelineConfig& cfg,
                       const TextTransformer& transformer, const SentimentScorer& scorer);

// Parallel detect over a whole dataset, preserving input order; the first
// per-sample failure aborts the run. Labels are not required.
std::vector<DetectionResult> detect_all(const std::vector<TextSample>& dataset,
                                        const PipelineConfig& cfg,
                                        const TextTransformer& transformer,
                                        const SentimentScorer& scorer, int jobs = 4);

struct SampleFailure {
    std::string sample_id;
    std::string error;
};

struct EvaluationReport {
    double overall_f1 = 0.0;
    double accuracy = 0.0;
    std::map<std::string, double> per_domain_f1;
    std::optional<double> domain_f1_std;
    std::vector<Verdict> verdicts;        // input order; failed samples excluded
    std::vector<SampleFailure> failures;  // excluded from all metrics
    PipelineConfig config_echo;
};

// Runs detect over every sample with a bounded worker pool. All samples must
// be labeled (checked before any backend call). Per-sample failures are
// recorded and excluded from the metrics rather than aborting the run.
EvaluationReport evaluate(const std::vector<TextSample>& dataset, const PipelineConfig& cfg,
                          const TextTransformer& transformer, const SentimentScorer& scorer,
                          int jobs = 4);

// Evaluates the dataset truncated to each length, reusing cfg.epsilon.
std::map<int, EvaluationReport> length_sweep(const std::vector<TextSample>& dataset,
                                             const PipelineConfig& cfg,
                                             const std::vector<int>& lengths,
                                             const TextTransformer& transformer,
                                             const SentimentScorer& scorer, int jobs = 4);

// Evaluates with word-level perturbation applied at each rate. By default
// only Llm-labeled samples are perturbed, matching the attack protocol;
// perturb_both extends it to both classes for sensitivity studies.
std::map<double, EvaluationReport> perturbation_sweep(const std::vector<TextSample>& dataset,
                                                      const PipelineConfig& cfg,
                                                      const std::vector<double>& rates,
                                                      std::uint64_t seed,
                                                      const TextTransformer& transformer,
                                                      const SentimentScorer& scorer, int jobs = 4,
                                                      bool perturb_both = false);

struct AblationRow {
    EvaluationReport report;
    std::int64_t tokens_used = 0;
};

// Evaluates with n_rewrites set to each n (prompts are consumed in order, so
// n=1 uses only the first prompt). Token usage is read from the gateway when
// one is supplied; offline runs report 0.
std::map<int, AblationRow> ablate_n(const std::vector<TextSample>& dataset,
                                    const PipelineConfig& cfg, const std::vector<int>& ns,
                                    const TextTransformer& transformer,
                                    const SentimentScorer& scorer,
                                    const LlmGateway* gateway = nullptr, int jobs = 4);

// Deterministically emits count_per_class human-like samples (sentences
// dense in lexicon words with alternating polarity) and count_per_class
// LLM-like samples (mostly neutral with at most a couple of isolated hits),
// interleaved, 4-12 sentences each, across 5 synthetic domains.
std::vector<TextSample> generate_synthetic_corpus(int count_per_class, std::uint64_t seed);

nlohmann::json config_to_json(const PipelineConfig& cfg);
nlohmann::json report_to_json(const EvaluationReport& report);

}  // namespace dsipa
