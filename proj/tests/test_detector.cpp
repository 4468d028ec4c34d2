#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <mutex>
#include <random>
#include <set>

#include "dsipa/detector.hpp"
#include "dsipa/metrics.hpp"

using namespace dsipa;

namespace {

PipelineConfig offline_config(MetricKind kind, double epsilon, int n_rewrites = 5) {
    PipelineConfig cfg;
    cfg.prompts = default_prompt_set();
    cfg.metric_kind = kind;
    cfg.epsilon = epsilon;
    cfg.n_rewrites = n_rewrites;
    cfg.offline = true;
    return cfg;
}

TextSample sample_of(const std::string& id, const std::string& text,
                     std::optional<Label> label = std::nullopt,
                     std::optional<std::string> domain = std::nullopt) {
    return TextSample{id, text, label, domain, std::nullopt};
}

struct RecordingTransformer : TextTransformer {
    mutable std::mutex mutex;
    mutable std::vector<std::string> instructions;
    std::string transform(const std::string& text, const std::string& instruction) const override {
        std::lock_guard lock(mutex);
        instructions.push_back(instruction);
        return text;
    }
    std::string descriptor() const override { return "recording"; }
};

struct CountingScorer : SentimentScorer {
    mutable std::atomic<int> calls{0};
    SentimentVector score(const std::string& text) const override {
        ++calls;
        return lexicon_score(text);
    }
    std::string descriptor() const override { return "counting"; }
};

struct FailOnIdScorer : SentimentScorer {
    std::string needle;
    explicit FailOnIdScorer(std::string n) : needle(std::move(n)) {}
    SentimentVector score(const std::string& text) const override {
        if (text.find(needle) != std::string::npos) throw std::runtime_error("poisoned text");
        return lexicon_score(text);
    }
    std::string descriptor() const override { return "fail-on-id"; }
};

// Adds per-call multiplicative noise on top of the lexicon score; call order
// makes rewrite readings differ, so averaging over prompts matters.
struct NoisyScorer : SentimentScorer {
    double amplitude;
    mutable std::atomic<std::uint64_t> calls{0};
    explicit NoisyScorer(double a) : amplitude(a) {}
    SentimentVector score(const std::string& text) const override {
        const std::uint64_t call = calls.fetch_add(1);
        std::mt19937_64 rng(stable_hash64(text) ^ (call * 0x9e3779b97f4a7c15ULL));
        std::vector<double> comps = lexicon_score(text).components();
        for (double& c : comps) {
            const double u = static_cast<double>(rng() % 10000) / 10000.0 - 0.5;
            c *= std::exp(u * amplitude);
        }
        return validate_vector(comps);
    }
    std::string descriptor() const override { return "noisy-lexicon"; }
};

int count_lexicon_hits(const std::string& text) {
    int hits = 0;
    for (const std::string& w : split_words(text)) {
        if (Lexicon::builtin().token_valence(w) != 0) ++hits;
    }
    return hits;
}

}  // namespace

TEST_CASE("validate_config enforces the rewrite budget and sdp pairs") {
    PipelineConfig cfg = offline_config(MetricKind::Sdc, 0.5);
    CHECK_NOTHROW(validate_config(cfg));
    cfg.n_rewrites = 0;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
    cfg.n_rewrites = 6;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
    cfg.n_rewrites = 5;
    cfg.metric_kind = MetricKind::Sdp;
    cfg.prompts.inverse_pairs.clear();
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
}

TEST_CASE("detect with the identity transformer yields exactly zero divergence") {
    const IdentityTransformer identity;
    const LexiconScorer scorer;
    std::mt19937 rng(21);
    const std::vector<std::string> pool = {"good", "bad", "table", "road", "lovely", "the"};
    for (MetricKind kind : {MetricKind::Sdc, MetricKind::Sdp}) {
        for (int trial = 0; trial < 20; ++trial) {
            std::string text;
            const int n = 3 + static_cast<int>(rng() % 10);
            for (int i = 0; i < n; ++i) {
                if (i > 0) text += ' ';
                text += pool[rng() % pool.size()];
            }
            const DetectionResult result =
                detect(sample_of("t", text), offline_config(kind, 0.25), identity, scorer);
            CHECK(result.report.dx == 0.0);
            CHECK(result.verdict.predicted == Label::Llm);
        }
    }
}

TEST_CASE("detect with strip rewriting matches the hand-composed pipeline") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    const std::string text = "The food was good and lovely. The day was awful and sad.";
    const PipelineConfig cfg = offline_config(MetricKind::Sdc, 0.5);

    const SentimentVector original = scorer.score(text);
    const std::string rewritten = strip.transform(text, cfg.prompts.rewrite_prompts[0]);
    const double expected_l1 = log_l1(original, scorer.score(rewritten));

    const DetectionResult result = detect(sample_of("fixture", text), cfg, strip, scorer);
    CHECK(result.report.dx > 0.0);
    REQUIRE(result.report.per_prompt_l1.size() == 5);
    for (double l1 : result.report.per_prompt_l1) {
        CHECK(l1 == doctest::Approx(expected_l1).epsilon(1e-12));
    }
    CHECK(result.report.dx == doctest::Approx(expected_l1).epsilon(1e-12));
    CHECK(result.verdict.predicted == Label::Human);
    CHECK(result.verdict.dx == result.report.dx);
}

TEST_CASE("detect names the failing prompt index") {
    struct FailSecond : TextTransformer {
        std::string transform(const std::string& text, const std::string& instruction) const override {
            if (instruction == default_prompt_set().rewrite_prompts[1]) {
                throw std::runtime_error("backend refused");
            }
            return text;
        }
        std::string descriptor() const override { return "fail-second"; }
    } transformer;
    const LexiconScorer scorer;
    CHECK_THROWS_WITH_AS(
        detect(sample_of("s9", "plain text"), offline_config(MetricKind::Sdc, 0.5), transformer,
               scorer),
        doctest::Contains("prompt 2"), std::runtime_error);
}

TEST_CASE("detect consumes prompts in order and sdp cycles inverse pairs") {
    RecordingTransformer recorder;
    const LexiconScorer scorer;
    const PromptSet prompts = default_prompt_set();

    detect(sample_of("s", "some plain words"), offline_config(MetricKind::Sdc, 0.5, 1), recorder,
           scorer);
    REQUIRE(recorder.instructions.size() == 1);
    CHECK(recorder.instructions[0] == prompts.rewrite_prompts[0]);

    recorder.instructions.clear();
    detect(sample_of("s", "some plain words"), offline_config(MetricKind::Sdp, 0.5, 3), recorder,
           scorer);
    // per prompt: rewrite + forward + backward
    REQUIRE(recorder.instructions.size() == 9);
    CHECK(recorder.instructions[0] == prompts.rewrite_prompts[0]);
    CHECK(recorder.instructions[1] == prompts.inverse_pairs[0].forward);
    CHECK(recorder.instructions[2] == prompts.inverse_pairs[0].backward);
    CHECK(recorder.instructions[4] == prompts.inverse_pairs[1].forward);
    // third prompt cycles back to the first pair
    CHECK(recorder.instructions[7] == prompts.inverse_pairs[0].forward);
}

TEST_CASE("evaluate rejects unlabeled samples before any backend call") {
    CountingScorer scorer;
    const IdentityTransformer identity;
    std::vector<TextSample> dataset = {sample_of("a", "text one", Label::Human),
                                       sample_of("b", "text two")};
    CHECK_THROWS_AS(evaluate(dataset, offline_config(MetricKind::Sdc, 0.5), identity, scorer),
                    std::invalid_argument);
    CHECK(scorer.calls.load() == 0);
}

TEST_CASE("evaluate on a separated corpus reaches perfect F1 and keeps input order") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    std::vector<TextSample> dataset;
    for (int i = 0; i < 10; ++i) {
        dataset.push_back(sample_of("h" + std::to_string(i),
                                    "lovely wonderful gorgeous awful terrible road table paper",
                                    Label::Human, "d" + std::to_string(i % 2)));
        dataset.push_back(sample_of("l" + std::to_string(i),
                                    "the road and the table near the paper and the stone",
                                    Label::Llm, "d" + std::to_string(i % 2)));
    }
    const EvaluationReport report =
        evaluate(dataset, offline_config(MetricKind::Sdc, 1.0), strip, scorer);
    CHECK(report.overall_f1 == doctest::Approx(1.0));
    CHECK(report.accuracy == doctest::Approx(1.0));
    CHECK(report.per_domain_f1.size() == 2);
    REQUIRE(report.domain_f1_std.has_value());
    CHECK(*report.domain_f1_std == doctest::Approx(0.0));
    REQUIRE(report.verdicts.size() == dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        CHECK(report.verdicts[i].sample_id == dataset[i].id);
    }
}

TEST_CASE("evaluate with one domain omits the domain std") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    std::vector<TextSample> dataset = {
        sample_of("h", "lovely wonderful awful terrible words here", Label::Human, "only"),
        sample_of("l", "the road and the table here", Label::Llm, "only")};
    const EvaluationReport report =
        evaluate(dataset, offline_config(MetricKind::Sdc, 1.0), strip, scorer);
    CHECK(report.per_domain_f1.size() == 1);
    CHECK_FALSE(report.domain_f1_std.has_value());
}

TEST_CASE("evaluate with flipped labels complements per the verdict oracle") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    std::vector<TextSample> dataset;
    for (int i = 0; i < 6; ++i) {
        dataset.push_back(sample_of("h" + std::to_string(i),
                                    "lovely terrible gorgeous awful sweet bitter road",
                                    Label::Human));
        dataset.push_back(
            sample_of("l" + std::to_string(i), "the road and the stone table", Label::Llm));
    }
    const PipelineConfig cfg = offline_config(MetricKind::Sdc, 1.0);
    const EvaluationReport base = evaluate(dataset, cfg, strip, scorer);

    std::vector<TextSample> flipped = dataset;
    for (TextSample& s : flipped) {
        s.label = (*s.label == Label::Human) ? Label::Llm : Label::Human;
    }
    const EvaluationReport flipped_report = evaluate(flipped, cfg, strip, scorer);

    // Oracle: recompute F1 from the base verdicts against flipped labels.
    std::vector<Label> predicted;
    std::vector<Label> actual;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        predicted.push_back(base.verdicts[i].predicted);
        actual.push_back(*flipped[i].label);
    }
    CHECK(flipped_report.overall_f1 == doctest::Approx(f1_score(predicted, actual)));
    CHECK(flipped_report.overall_f1 == doctest::Approx(0.0));
    CHECK(flipped_report.accuracy == doctest::Approx(1.0 - base.accuracy));
}

TEST_CASE("evaluate is independent of the parallelism level") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    const std::vector<TextSample> dataset = generate_synthetic_corpus(30, 7);
    const PipelineConfig cfg = offline_config(MetricKind::Sdc, 1.5);
    const EvaluationReport serial = evaluate(dataset, cfg, strip, scorer, 1);
    const EvaluationReport parallel = evaluate(dataset, cfg, strip, scorer, 8);
    CHECK(report_to_json(serial) == report_to_json(parallel));
}

TEST_CASE("evaluate records per-sample failures and excludes them") {
    const LexiconStripTransformer strip;
    const FailOnIdScorer scorer("POISON");
    std::vector<TextSample> dataset = {
        sample_of("ok1", "lovely wonderful awful words", Label::Human),
        sample_of("bad", "POISON text here", Label::Llm),
        sample_of("ok2", "the road and the table", Label::Llm)};
    const EvaluationReport report =
        evaluate(dataset, offline_config(MetricKind::Sdc, 1.0), strip, scorer);
    REQUIRE(report.failures.size() == 1);
    CHECK(report.failures[0].sample_id == "bad");
    CHECK(report.verdicts.size() == 2);
    CHECK(report.overall_f1 == doctest::Approx(1.0));
}

TEST_CASE("detect_all preserves order and fails fast") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    std::vector<TextSample> dataset = {sample_of("a", "good words"),
                                       sample_of("b", "more plain text")};
    const auto results = detect_all(dataset, offline_config(MetricKind::Sdc, 1.0), strip, scorer);
    REQUIRE(results.size() == 2);
    CHECK(results[0].verdict.sample_id == "a");

    const FailOnIdScorer failing("plain");
    CHECK_THROWS_WITH_AS(
        detect_all(dataset, offline_config(MetricKind::Sdc, 1.0), strip, failing),
        doctest::Contains("sample b"), std::runtime_error);
}

TEST_CASE("length_sweep keys reports by length and no-op truncation matches evaluate") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    const std::vector<TextSample> dataset = generate_synthetic_corpus(10, 3);
    const PipelineConfig cfg = offline_config(MetricKind::Sdc, 1.5);
    const auto reports = length_sweep(dataset, cfg, {64, 100000}, strip, scorer);
    REQUIRE(reports.size() == 2);
    REQUIRE(reports.count(64) == 1);
    const EvaluationReport plain = evaluate(dataset, cfg, strip, scorer);
    CHECK(report_to_json(reports.at(100000)) == report_to_json(plain));
    CHECK_THROWS_AS(length_sweep(dataset, cfg, {}, strip, scorer), std::invalid_argument);
}

TEST_CASE("length_sweep F1 is non-decreasing on a longer-is-stronger corpus") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    // Human texts carry no signal in the first 20 words and dense alternating
    // hits afterwards; llm texts are neutral throughout.
    std::vector<TextSample> dataset;
    std::mt19937 rng(13);
    const std::vector<std::string> neutral = {"table", "road", "paper", "stone", "field", "the"};
    for (int s = 0; s < 12; ++s) {
        std::string human;
        for (int w = 0; w < 200; ++w) {
            if (w > 0) human += ' ';
            if (w >= 20 && w % 3 == 0) {
                human += (w % 2 == 0) ? "lovely" : "awful";
            } else {
                human += neutral[rng() % neutral.size()];
            }
        }
        dataset.push_back(sample_of("h" + std::to_string(s), human, Label::Human));
        std::string llm;
        for (int w = 0; w < 200; ++w) {
            if (w > 0) llm += ' ';
            llm += neutral[rng() % neutral.size()];
        }
        dataset.push_back(sample_of("l" + std::to_string(s), llm, Label::Llm));
    }
    const PipelineConfig cfg = offline_config(MetricKind::Sdc, 1.0);
    const auto reports = length_sweep(dataset, cfg, {20, 64, 200}, strip, scorer);
    const double f20 = reports.at(20).overall_f1;
    const double f64 = reports.at(64).overall_f1;
    const double f200 = reports.at(200).overall_f1;
    CHECK(f20 <= f64 + 1e-12);
    CHECK(f64 <= f200 + 1e-12);
    CHECK(f200 == doctest::Approx(1.0));
}

TEST_CASE("perturbation_sweep rate zero equals the baseline and is seed-deterministic") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    const std::vector<TextSample> dataset = generate_synthetic_corpus(12, 5);
    const PipelineConfig cfg = offline_config(MetricKind::Sdc, 1.5);

    const auto sweep = perturbation_sweep(dataset, cfg, {0.0, 0.2}, 99, strip, scorer);
    const EvaluationReport baseline = evaluate(dataset, cfg, strip, scorer);
    CHECK(report_to_json(sweep.at(0.0)) == report_to_json(baseline));

    const auto again = perturbation_sweep(dataset, cfg, {0.0, 0.2}, 99, strip, scorer);
    CHECK(report_to_json(sweep.at(0.2)) == report_to_json(again.at(0.2)));

    CHECK_THROWS_AS(perturbation_sweep(dataset, cfg, {1.5}, 99, strip, scorer),
                    std::invalid_argument);
}

TEST_CASE("perturbation_sweep leaves human samples untouched unless asked") {
    // A scorer that traps on mangled marker words proves humans are unperturbed.
    struct TrapScorer : SentimentScorer {
        SentimentVector score(const std::string& text) const override {
            if (text.find("sentinelword") == std::string::npos &&
                text.find("llmfiller") == std::string::npos) {
                throw std::runtime_error("marker word was perturbed");
            }
            return lexicon_score(text);
        }
        std::string descriptor() const override { return "trap"; }
    } trap;
    const IdentityTransformer identity;
    std::vector<TextSample> dataset = {
        sample_of("h", "sentinelword sentinelword sentinelword", Label::Human),
        sample_of("l", "llmfiller llmfiller llmfiller", Label::Llm)};
    const PipelineConfig cfg = offline_config(MetricKind::Sdc, 0.5);
    // rate 1.0 perturbs every word of llm texts; human text must survive intact.
    const auto sweep = perturbation_sweep(dataset, cfg, {1.0}, 4, identity, trap);
    REQUIRE(sweep.at(1.0).failures.size() == 1);
    CHECK(sweep.at(1.0).failures[0].sample_id == "l");
    // with perturb_both the human sample is mangled too
    const auto both = perturbation_sweep(dataset, cfg, {1.0}, 4, identity, trap, 4, true);
    CHECK(both.at(1.0).failures.size() == 2);
}

TEST_CASE("ablate_n keys reports by n and reports zero tokens offline") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    const std::vector<TextSample> dataset = generate_synthetic_corpus(8, 11);
    const PipelineConfig cfg = offline_config(MetricKind::Sdc, 1.5);
    const auto rows = ablate_n(dataset, cfg, {1, 5}, strip, scorer);
    REQUIRE(rows.size() == 2);
    CHECK(rows.at(1).tokens_used == 0);
    CHECK(rows.at(5).tokens_used == 0);
    CHECK(rows.at(1).report.config_echo.n_rewrites == 1);
    CHECK_THROWS_AS(ablate_n(dataset, cfg, {9}, strip, scorer), std::invalid_argument);
}

TEST_CASE("averaging over five rewrites beats a single rewrite under scorer noise") {
    const LexiconStripTransformer strip;
    const std::vector<TextSample> dataset = generate_synthetic_corpus(40, 42);
    PipelineConfig cfg = offline_config(MetricKind::Sdc, 1.8);

    const NoisyScorer noisy_a(1.1);
    const double f1_n1 =
        ablate_n(dataset, cfg, {1}, strip, noisy_a, nullptr, 1).at(1).report.overall_f1;
    const NoisyScorer noisy_b(1.1);
    const double f1_n5 =
        ablate_n(dataset, cfg, {5}, strip, noisy_b, nullptr, 1).at(5).report.overall_f1;
    CHECK(f1_n5 >= f1_n1);
}

TEST_CASE("synthetic corpus structure: counts, domains, sentences, determinism") {
    const std::vector<TextSample> tiny = generate_synthetic_corpus(1, 9);
    REQUIRE(tiny.size() == 2);
    CHECK(tiny[0].label == Label::Human);
    CHECK(tiny[1].label == Label::Llm);

    const std::vector<TextSample> a = generate_synthetic_corpus(25, 42);
    const std::vector<TextSample> b = generate_synthetic_corpus(25, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].text == b[i].text);
        CHECK(a[i].domain == b[i].domain);
    }
    CHECK(generate_synthetic_corpus(25, 43)[0].text != a[0].text);

    std::set<std::string> domains;
    for (const TextSample& s : a) {
        REQUIRE(s.domain.has_value());
        domains.insert(*s.domain);
        const std::size_t sentences = split_sentences(s.text).size();
        CHECK(sentences >= 4);
        CHECK(sentences <= 12);
    }
    CHECK(domains.size() == 5);
    CHECK_THROWS_AS(generate_synthetic_corpus(0, 1), std::invalid_argument);
}

TEST_CASE("synthetic corpus human class is denser in lexicon hits") {
    const std::vector<TextSample> corpus = generate_synthetic_corpus(100, 42);
    double human_hits = 0.0;
    double human_words = 0.0;
    double llm_hits = 0.0;
    double llm_words = 0.0;
    for (const TextSample& s : corpus) {
        const double hits = count_lexicon_hits(s.text);
        const double words = static_cast<double>(split_words(s.text).size());
        if (*s.label == Label::Human) {
            human_hits += hits;
            human_words += words;
        } else {
            llm_hits += hits;
            llm_words += words;
        }
    }
    CHECK(human_hits / human_words > llm_hits / llm_words);
    CHECK(human_hits / human_words > 0.2);
    CHECK(llm_hits / llm_words < 0.05);
}

TEST_CASE("synthetic corpus SDC distributions are nearly disjoint at seed 42") {
    const LexiconStripTransformer strip;
    const LexiconScorer scorer;
    const std::vector<TextSample> corpus = generate_synthetic_corpus(100, 42);
    const PipelineConfig cfg = offline_config(MetricKind::Sdc, 0.0);
    const auto results = detect_all(corpus, cfg, strip, scorer);

    std::vector<double> scores;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        scores.push_back(results[i].report.dx);
        labels.push_back(*corpus[i].label);
    }
    const CalibrationResult best = calibrate_threshold(scores, labels);
    // <= 5% overlap mass between the class supports
    std::size_t misclassified = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (classify(scores[i], best.epsilon) != labels[i]) ++misclassified;
    }
    CHECK(static_cast<double>(misclassified) / static_cast<double>(scores.size()) <= 0.05);
}
