#include "dsipa/detector.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <thread>

#include "dsipa/metrics.hpp"

namespace dsipa {

void validate_config(const PipelineConfig& cfg) {
    validate_prompt_set(cfg.prompts);
    if (cfg.n_rewrites < 1 ||
        static_cast<std::size_t>(cfg.n_rewrites) > cfg.prompts.rewrite_prompts.size()) {
        throw std::invalid_argument("pipeline config: n_rewrites must be in [1, " +
                                    std::to_string(cfg.prompts.rewrite_prompts.size()) + "]");
    }
    if (cfg.metric_kind == MetricKind::Sdp && cfg.prompts.inverse_pairs.empty()) {
        throw std::invalid_argument("pipeline config: metric sdp needs at least one inverse pair");
    }
}

DetectionResult detect(const TextSample& sample, const PipelineConfig& cfg,
                       const TextTransformer& transformer, const SentimentScorer& scorer) {
    validate_config(cfg);
    SentimentVector original = [&] {
        try {
            return scorer.score(sample.text);
        } catch (const std::exception& e) {
            throw std::runtime_error("sample " + sample.id + ", original scoring: " + e.what());
        }
    }();
    SentimentProfile profile{std::move(original), {}, {}};
    for (int i = 0; i < cfg.n_rewrites; ++i) {
        const std::string& prompt = cfg.prompts.rewrite_prompts[static_cast<std::size_t>(i)];
        const std::string prompt_id = "p" + std::to_string(i + 1);
        try {
            const std::string rewritten = rewrite_low_emotion(sample.text, prompt, transformer);
            profile.rewrites.push_back({prompt_id, scorer.score(rewritten)});
            if (cfg.metric_kind == MetricKind::Sdp) {
                const InversePair& pair =
                    cfg.prompts.inverse_pairs[static_cast<std::size_t>(i) %
                                              cfg.prompts.inverse_pairs.size()];
                const std::string roundtripped = roundtrip_transform(rewritten, pair, transformer);
                profile.roundtrips.push_back({prompt_id, scorer.score(roundtripped)});
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("sample " + sample.id + ", prompt " + std::to_string(i + 1) +
                                     ": " + e.what());
        }
    }
    DetectionResult result;
    result.report = divergence_score(profile, cfg.metric_kind);
    result.verdict = Verdict{sample.id, classify(result.report.dx, cfg.epsilon),
                             result.report.dx, cfg.epsilon};
    return result;
}

namespace {

struct SlotOutcome {
    bool ok = false;
    DetectionResult result;
    std::string error;
};

std::vector<SlotOutcome> run_detections(const std::vector<TextSample>& dataset,
                                        const PipelineConfig& cfg,
                                        const TextTransformer& transformer,
                                        const SentimentScorer& scorer, int jobs) {
    std::vector<SlotOutcome> outcomes(dataset.size());
    if (dataset.empty()) return outcomes;
    const int workers =
        std::max(1, std::min<int>(jobs, static_cast<int>(dataset.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= dataset.size()) break;
            try {
                outcomes[i].result = detect(dataset[i], cfg, transformer, scorer);
                outcomes[i].ok = true;
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    return outcomes;
}

}  // namespace

std::vector<DetectionResult> detect_all(const std::vector<TextSample>& dataset,
                                        const PipelineConfig& cfg,
                                        const TextTransformer& transformer,
                                        const SentimentScorer& scorer, int jobs) {
    validate_config(cfg);
    std::vector<SlotOutcome> outcomes = run_detections(dataset, cfg, transformer, scorer, jobs);
    std::vector<DetectionResult> results;
    results.reserve(outcomes.size());
    for (SlotOutcome& outcome : outcomes) {
        if (!outcome.ok) throw std::runtime_error(outcome.error);
        results.push_back(std::move(outcome.result));
    }
    return results;
}

EvaluationReport evaluate(const std::vector<TextSample>& dataset, const PipelineConfig& cfg,
                          const TextTransformer& transformer, const SentimentScorer& scorer,
                          int jobs) {
    validate_config(cfg);
    for (const TextSample& sample : dataset) {
        if (!sample.label) {
            throw std::invalid_argument("evaluate: sample \"" + sample.id + "\" is unlabeled");
        }
    }

    EvaluationReport report;
    report.config_echo = cfg;

    const std::vector<SlotOutcome> outcomes =
        run_detections(dataset, cfg, transformer, scorer, jobs);

    std::vector<Label> predicted;
    std::vector<Label> actual;
    std::map<std::string, std::pair<std::vector<Label>, std::vector<Label>>> by_domain;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!outcomes[i].ok) {
            report.failures.push_back({dataset[i].id, outcomes[i].error});
            continue;
        }
        report.verdicts.push_back(outcomes[i].result.verdict);
        predicted.push_back(outcomes[i].result.verdict.predicted);
        actual.push_back(*dataset[i].label);
        auto& [dom_pred, dom_actual] = by_domain[dataset[i].domain.value_or("(none)")];
        dom_pred.push_back(outcomes[i].result.verdict.predicted);
        dom_actual.push_back(*dataset[i].label);
    }

    if (!predicted.empty()) {
        report.overall_f1 = f1_score(predicted, actual);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            if (predicted[i] == actual[i]) ++correct;
        }
        report.accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
        for (const auto& [domain, pair] : by_domain) {
            report.per_domain_f1[domain] = f1_score(pair.first, pair.second);
        }
        if (report.per_domain_f1.size() >= 2) {
            std::vector<double> values;
            values.reserve(report.per_domain_f1.size());
            for (const auto& [domain, f1] : report.per_domain_f1) values.push_back(f1);
            report.domain_f1_std = std_dev(values);
        }
    }
    return report;
}

std::map<int, EvaluationReport> length_sweep(const std::vector<TextSample>& dataset,
                                             const PipelineConfig& cfg,
                                             const std::vector<int>& lengths,
                                             const TextTransformer& transformer,
                                             const SentimentScorer& scorer, int jobs) {
    if (lengths.empty()) throw std::invalid_argument("length_sweep: no lengths given");
    std::map<int, EvaluationReport> reports;
    for (int length : lengths) {
        std::vector<TextSample> truncated = dataset;
        for (TextSample& sample : truncated) {
            sample.text = truncate_tokens(sample.text, length);
        }
        reports[length] = evaluate(truncated, cfg, transformer, scorer, jobs);
    }
    return reports;
}

std::map<double, EvaluationReport> perturbation_sweep(const std::vector<TextSample>& dataset,
                                                      const PipelineConfig& cfg,
                                                      const std::vector<double>& rates,
                                                      std::uint64_t seed,
                                                      const TextTransformer& transformer,
                                                      const SentimentScorer& scorer, int jobs,
                                                      bool perturb_both) {
    std::map<double, EvaluationReport> reports;
    for (double rate : rates) {
        if (!(rate >= 0.0 && rate <= 1.0)) {
            throw std::invalid_argument("perturbation_sweep: rate outside [0, 1]");
        }
        std::vector<TextSample> perturbed = dataset;
        if (rate > 0.0) {
            for (TextSample& sample : perturbed) {
                const bool is_target =
                    perturb_both || (sample.label && *sample.label == Label::Llm);
                if (is_target) {
                    sample.text = perturb_words(sample.text, rate, seed ^ stable_hash64(sample.id));
                }
            }
        }
        reports[rate] = evaluate(perturbed, cfg, transformer, scorer, jobs);
    }
    return reports;
}

std::map<int, AblationRow> ablate_n(const std::vector<TextSample>& dataset,
                                    const PipelineConfig& cfg, const std::vector<int>& ns,
                                    const TextTransformer& transformer,
                                    const SentimentScorer& scorer, const LlmGateway* gateway,
                                    int jobs) {
    std::map<int, AblationRow> rows;
    for (int n : ns) {
        PipelineConfig ablated = cfg;
        ablated.n_rewrites = n;
        validate_config(ablated);
        const std::int64_t before = gateway ? gateway->tokens_used() : 0;
        AblationRow row;
        row.report = evaluate(dataset, ablated, transformer, scorer, jobs);
        row.tokens_used = (gateway ? gateway->tokens_used() : 0) - before;
        rows[n] = std::move(row);
    }
    return rows;
}

namespace {

// Filler vocabulary for the synthetic corpus; disjoint from the built-in
// valence lists (asserted by a unit test).
const char* const kNeutralWords[] = {
    "the", "a", "report", "table", "window", "road", "street", "city", "river", "mountain",
    "paper", "system", "method", "process", "data", "number", "figure", "section", "chapter",
    "morning", "evening", "week", "month", "year", "water", "stone", "glass", "metal", "wood",
    "field", "garden", "market", "office", "building", "machine", "engine", "wheel", "device",
    "signal", "letter", "word", "sentence", "page", "book", "journal", "record", "account",
    "item", "object", "place", "area", "region", "point", "line", "surface", "volume",
    "measure", "unit", "amount", "level", "result", "effect", "cause", "reason", "basis",
};

const char* const kSyntheticDomains[] = {"news", "code", "essay", "paper", "review"};

std::size_t draw(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

std::string pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
    return pool[draw(rng, pool.size())];
}

std::string assemble_sentence(std::mt19937_64& rng, std::vector<std::string> words) {
    for (std::size_t i = words.size(); i > 1; --i) {
        std::swap(words[i - 1], words[draw(rng, i)]);
    }
    words.front()[0] =
        static_cast<char>(std::toupper(static_cast<unsigned char>(words.front()[0])));
    std::string sentence;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) sentence += ' ';
        sentence += words[i];
    }
    sentence += '.';
    return sentence;
}

std::vector<std::string> neutral_pool() {
    return std::vector<std::string>(std::begin(kNeutralWords), std::end(kNeutralWords));
}

// Emotionally dense text whose sentences alternate between positive- and
// negative-dominated vocabulary: high ESR, large sentiment shift when the
// valence words are stripped.
std::string human_like_text(std::mt19937_64& rng, const Lexicon& lexicon,
                            const std::vector<std::string>& neutrals) {
    const std::size_t sentences = 4 + draw(rng, 9);  // 4..12
    std::string text;
    for (std::size_t s = 0; s < sentences; ++s) {
        const bool positive = (s % 2 == 0);
        const std::vector<std::string>& hits =
            positive ? lexicon.positive_words() : lexicon.negative_words();
        std::vector<std::string> words;
        const std::size_t hit_count = 2 + draw(rng, 3);      // 2..4
        const std::size_t neutral_count = 4 + draw(rng, 4);  // 4..7
        for (std::size_t i = 0; i < hit_count; ++i) words.push_back(pick(rng, hits));
        for (std::size_t i = 0; i < neutral_count; ++i) words.push_back(pick(rng, neutrals));
        if (s > 0) text += ' ';
        text += assemble_sentence(rng, std::move(words));
    }
    return text;
}

// Flat, mostly neutral text with at most two isolated valence words: low ESR
// and a sentiment distribution that barely moves under stripping.
std::string llm_like_text(std::mt19937_64& rng, const Lexicon& lexicon,
                          const std::vector<std::string>& neutrals) {
    const std::size_t sentences = 4 + draw(rng, 9);  // 4..12
    const std::size_t hit_sentences = draw(rng, 3);  // 0..2 sentences with one hit
    std::vector<bool> has_hit(sentences, false);
    for (std::size_t i = 0; i < hit_sentences; ++i) {
        has_hit[draw(rng, sentences)] = true;
    }
    std::string text;
    for (std::size_t s = 0; s < sentences; ++s) {
        std::vector<std::string> words;
        const std::size_t neutral_count = 5 + draw(rng, 4);  // 5..8
        for (std::size_t i = 0; i < neutral_count; ++i) words.push_back(pick(rng, neutrals));
        if (has_hit[s]) {
            const std::vector<std::string>& hits =
                draw(rng, 2) == 0 ? lexicon.positive_words() : lexicon.negative_words();
            words.push_back(pick(rng, hits));
        }
        if (s > 0) text += ' ';
        text += assemble_sentence(rng, std::move(words));
    }
    return text;
}

std::string zero_padded(int value, int width) {
    std::string digits = std::to_string(value);
    while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
    return digits;
}

}  // namespace

std::vector<TextSample> generate_synthetic_corpus(int count_per_class, std::uint64_t seed) {
    if (count_per_class < 1) {
        throw std::invalid_argument("generate_synthetic_corpus: count_per_class must be >= 1");
    }
    const Lexicon& lexicon = Lexicon::builtin();
    const std::vector<std::string> neutrals = neutral_pool();
    std::mt19937_64 rng(seed);

    std::vector<TextSample> samples;
    samples.reserve(static_cast<std::size_t>(count_per_class) * 2);
    const std::size_t domain_count = std::size(kSyntheticDomains);
    for (int i = 0; i < count_per_class; ++i) {
        const std::string domain = kSyntheticDomains[static_cast<std::size_t>(i) % domain_count];
        TextSample human;
        human.id = "human-" + zero_padded(i, 4);
        human.text = human_like_text(rng, lexicon, neutrals);
        human.label = Label::Human;
        human.domain = domain;
        samples.push_back(std::move(human));

        TextSample llm;
        llm.id = "llm-" + zero_padded(i, 4);
        llm.text = llm_like_text(rng, lexicon, neutrals);
        llm.label = Label::Llm;
        llm.domain = domain;
        samples.push_back(std::move(llm));
    }
    return samples;
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
    nlohmann::json prompts;
    prompts["rewrite_prompts"] = cfg.prompts.rewrite_prompts;
    prompts["sentiment_prompt"] = cfg.prompts.sentiment_prompt;
    prompts["inverse_pairs"] = nlohmann::json::array();
    for (const InversePair& pair : cfg.prompts.inverse_pairs) {
        prompts["inverse_pairs"].push_back({{"forward", pair.forward},
                                            {"backward", pair.backward}});
    }
    nlohmann::json obj;
    obj["prompts"] = prompts;
    obj["metric"] = to_string(cfg.metric_kind);
    obj["epsilon"] = cfg.epsilon;
    obj["rewrite_backend"] = cfg.rewrite_backend;
    obj["scorer_backend"] = cfg.scorer_backend;
    obj["n_rewrites"] = cfg.n_rewrites;
    obj["offline"] = cfg.offline;
    return obj;
}

nlohmann::json report_to_json(const EvaluationReport& report) {
    nlohmann::json obj;
    obj["overall_f1"] = report.overall_f1;
    obj["accuracy"] = report.accuracy;
    obj["per_domain_f1"] = report.per_domain_f1;
    if (report.domain_f1_std) obj["domain_f1_std"] = *report.domain_f1_std;
    obj["excluded"] = report.failures.size();
    nlohmann::json verdicts = nlohmann::json::array();
    for (const Verdict& verdict : report.verdicts) {
        verdicts.push_back({{"sample_id", verdict.sample_id},
                            {"predicted", to_string(verdict.predicted)},
                            {"dx", verdict.dx},
                            {"threshold", verdict.threshold}});
    }
    obj["verdicts"] = verdicts;
    if (!report.failures.empty()) {
        nlohmann::json failures = nlohmann::json::array();
        for (const SampleFailure& failure : report.failures) {
            failures.push_back({{"sample_id", failure.sample_id}, {"error", failure.error}});
        }
        obj["failures"] = failures;
    }
    obj["config"] = config_to_json(report.config_echo);
    return obj;
}

}  // namespace dsipa
