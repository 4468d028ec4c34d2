#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsipa/dataset.hpp"
#include "dsipa/detector.hpp"
#include "dsipa/gateway.hpp"
#include "dsipa/metrics.hpp"
#include "dsipa/remote.hpp"
#include "dsipa/sentiment.hpp"
#include "dsipa/transform.hpp"

namespace {

using dsipa::Label;
using dsipa::MetricKind;
using dsipa::TextSample;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Flag combinations CLI11's excludes() cannot express.
struct UsageConflict : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string default_cache_dir() {
    const char* home = std::getenv("HOME");
    return std::string(home ? home : ".") + "/.cache/dsipa";
}

// Settings resolved with precedence flag > env > config file > built-in.
struct Settings {
    std::string config_path;
    std::string cache_dir = default_cache_dir();
    int jobs = 4;
    std::string endpoint;
    std::string model = "gpt-4";
    std::string scorer_model;  // defaults to model
    bool offline = false;
    std::string transformer;  // identity|strip|jitter|remote; auto when empty
    std::uint64_t jitter_seed = 7;
    int requests_per_minute = 60;
    int max_concurrent = 4;
    int n_rewrites = 0;  // 0 = min(5, configured prompt count)
    dsipa::PromptSet prompts = dsipa::default_prompt_set();

    int resolved_n_rewrites() const {
        if (n_rewrites > 0) return n_rewrites;
        return static_cast<int>(std::min<std::size_t>(5, prompts.rewrite_prompts.size()));
    }
};

void apply_config_file(Settings& settings, const CLI::App& app) {
    if (settings.config_path.empty()) return;
    settings.prompts = dsipa::load_prompt_set(settings.config_path);
    std::ifstream in(settings.config_path);
    json obj;
    in >> obj;
    // Flags that the user set explicitly keep precedence over the file.
    auto file_string = [&](const char* key, const char* flag, std::string& target) {
        if (obj.contains(key) && app.count(flag) == 0) target = obj[key].get<std::string>();
    };
    file_string("endpoint", "--endpoint", settings.endpoint);
    file_string("model", "--model", settings.model);
    file_string("scorer_model", "--scorer-model", settings.scorer_model);
    file_string("cache_dir", "--cache-dir", settings.cache_dir);
    if (obj.contains("jobs") && app.count("--jobs") == 0) settings.jobs = obj["jobs"].get<int>();
}

struct Backends {
    std::unique_ptr<dsipa::TextTransformer> transformer;
    std::unique_ptr<dsipa::SentimentScorer> scorer;
    std::shared_ptr<dsipa::LlmGateway> gateway;
};

Backends make_backends(const Settings& settings) {
    Backends backends;
    std::string choice = settings.transformer;
    if (choice.empty()) {
        choice = (!settings.offline && !settings.endpoint.empty()) ? "remote" : "strip";
    }
    if (settings.offline && choice == "remote") {
        throw UsageConflict("--offline cannot be combined with --transformer remote");
    }
    if (choice == "remote") {
        if (settings.endpoint.empty()) {
            throw std::runtime_error("remote backends need --endpoint (or offline mode)");
        }
        dsipa::GatewayConfig gw_config;
        gw_config.endpoint = settings.endpoint;
        gw_config.api_key = dsipa::api_key_from_env();
        gw_config.max_concurrent = settings.max_concurrent;
        gw_config.requests_per_minute = settings.requests_per_minute;
        backends.gateway = std::make_shared<dsipa::LlmGateway>(gw_config);

        dsipa::RemoteBackendConfig rewriter_config;
        rewriter_config.model = settings.model;
        rewriter_config.cache_dir = settings.cache_dir;
        backends.transformer =
            std::make_unique<dsipa::RemoteTransformer>(backends.gateway, rewriter_config);

        dsipa::RemoteBackendConfig scorer_config = rewriter_config;
        scorer_config.model =
            settings.scorer_model.empty() ? settings.model : settings.scorer_model;
        backends.scorer = std::make_unique<dsipa::RemoteScorer>(
            backends.gateway, scorer_config, settings.prompts.sentiment_prompt);
    } else {
        if (choice == "identity") {
            backends.transformer = std::make_unique<dsipa::IdentityTransformer>();
        } else if (choice == "strip") {
            backends.transformer = std::make_unique<dsipa::LexiconStripTransformer>();
        } else if (choice == "jitter") {
            backends.transformer = std::make_unique<dsipa::JitterTransformer>(settings.jitter_seed);
        } else {
            throw std::runtime_error("unknown transformer backend: " + choice);
        }
        backends.scorer = std::make_unique<dsipa::LexiconScorer>();
    }
    return backends;
}

dsipa::PipelineConfig make_pipeline_config(const Settings& settings, const Backends& backends,
                                           MetricKind metric, double epsilon, int n_rewrites) {
    dsipa::PipelineConfig cfg;
    cfg.prompts = settings.prompts;
    cfg.metric_kind = metric;
    cfg.epsilon = epsilon;
    cfg.rewrite_backend = backends.transformer->descriptor();
    cfg.scorer_backend = backends.scorer->descriptor();
    cfg.n_rewrites = n_rewrites;
    cfg.offline = backends.gateway == nullptr;
    return cfg;
}

// stdout or a file, picked per command.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::trunc);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        if (file_.is_open()) {
            file_.flush();
            if (!file_) throw std::runtime_error("failed writing output file");
        }
    }

private:
    std::ofstream file_;
};

double resolve_threshold(double threshold, const std::string& threshold_file, bool has_flag) {
    if (!threshold_file.empty()) {
        std::ifstream in(threshold_file);
        if (!in) throw std::runtime_error("cannot open threshold file: " + threshold_file);
        json obj;
        in >> obj;
        return obj.at("epsilon").get<double>();
    }
    if (!has_flag) throw std::runtime_error("either --threshold or --threshold-file is required");
    return threshold;
}

std::vector<double> detection_scores(const std::vector<dsipa::DetectionResult>& results) {
    std::vector<double> scores;
    scores.reserve(results.size());
    for (const dsipa::DetectionResult& r : results) scores.push_back(r.report.dx);
    return scores;
}

int cmd_detect(const Settings& settings, const std::string& input, MetricKind metric,
               double epsilon, const std::string& output_path) {
    const std::vector<TextSample> dataset = dsipa::load_dataset(input);
    const Backends backends = make_backends(settings);
    const dsipa::PipelineConfig cfg =
        make_pipeline_config(settings, backends, metric, epsilon, settings.resolved_n_rewrites());
    const std::vector<dsipa::DetectionResult> results =
        dsipa::detect_all(dataset, cfg, *backends.transformer, *backends.scorer, settings.jobs);

    Output out(output_path);
    std::size_t llm_count = 0;
    for (const dsipa::DetectionResult& result : results) {
        out.stream() << dsipa::verdict_to_json_line(result.verdict) << '\n';
        if (result.verdict.predicted == Label::Llm) ++llm_count;
    }
    out.finish();
    std::cerr << results.size() << " verdicts: " << (results.size() - llm_count) << " human, "
              << llm_count << " llm (metric=" << to_string(metric) << " epsilon=" << epsilon
              << ")\n";
    return kExitOk;
}

int cmd_calibrate(const Settings& settings, const std::string& input, MetricKind metric,
                  bool per_domain, const std::string& output_path) {
    const std::vector<TextSample> dataset = dsipa::load_dataset(input);
    for (const TextSample& sample : dataset) {
        if (!sample.label) {
            throw std::runtime_error("calibrate: sample \"" + sample.id + "\" is unlabeled");
        }
    }
    const Backends backends = make_backends(settings);
    const dsipa::PipelineConfig cfg =
        make_pipeline_config(settings, backends, metric, 0.0, settings.resolved_n_rewrites());
    const std::vector<dsipa::DetectionResult> results =
        dsipa::detect_all(dataset, cfg, *backends.transformer, *backends.scorer, settings.jobs);

    const std::vector<double> scores = detection_scores(results);
    std::vector<Label> labels;
    labels.reserve(dataset.size());
    for (const TextSample& sample : dataset) labels.push_back(*sample.label);

    const dsipa::CalibrationResult calibration = dsipa::calibrate_threshold(scores, labels);

    json obj;
    obj["epsilon"] = calibration.epsilon;
    obj["f1_at_epsilon"] = calibration.f1_at_epsilon;
    obj["candidates_evaluated"] = calibration.candidates_evaluated;
    obj["metric"] = to_string(metric);
    obj["config_digest"] = dsipa::sha256_hex(dsipa::config_to_json(cfg).dump());
    if (per_domain) {
        json domains = json::object();
        std::map<std::string, std::pair<std::vector<double>, std::vector<Label>>> grouped;
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            auto& [dom_scores, dom_labels] = grouped[dataset[i].domain.value_or("(none)")];
            dom_scores.push_back(scores[i]);
            dom_labels.push_back(labels[i]);
        }
        for (const auto& [domain, pair] : grouped) {
            try {
                const dsipa::CalibrationResult dom = dsipa::calibrate_threshold(pair.first, pair.second);
                domains[domain] = {{"epsilon", dom.epsilon}, {"f1_at_epsilon", dom.f1_at_epsilon}};
            } catch (const std::exception&) {
                // single-class domain; skipped
            }
        }
        obj["per_domain"] = domains;
    }

    Output out(output_path);
    out.stream() << obj.dump(2) << '\n';
    out.finish();
    std::cerr << "calibrated epsilon=" << calibration.epsilon
              << " f1=" << calibration.f1_at_epsilon << " over "
              << calibration.candidates_evaluated << " candidates\n";
    return kExitOk;
}

void print_report_summary(const dsipa::EvaluationReport& report) {
    std::cerr << "overall F1 " << report.overall_f1 << ", accuracy " << report.accuracy << "\n";
    for (const auto& [domain, f1] : report.per_domain_f1) {
        std::cerr << "  " << domain << ": F1 " << f1 << "\n";
    }
    if (report.domain_f1_std) {
        const double population = *report.domain_f1_std;
        const double n = static_cast<double>(report.per_domain_f1.size());
        const double sample = population * std::sqrt(n / (n - 1.0));
        std::cerr << "  domain F1 std: " << population << " (population), " << sample
                  << " (sample)\n";
    }
    if (!report.failures.empty()) {
        std::cerr << "  excluded " << report.failures.size() << " failed samples\n";
    }
}

int cmd_evaluate(const Settings& settings, const std::string& input, MetricKind metric,
                 double epsilon, const std::vector<int>& lengths, const std::vector<int>& ns,
                 const std::string& output_path) {
    if (!lengths.empty() && !ns.empty()) {
        throw UsageConflict("--lengths and --ns cannot be combined");
    }
    const std::vector<TextSample> dataset = dsipa::load_dataset(input);
    const Backends backends = make_backends(settings);
    const dsipa::PipelineConfig cfg =
        make_pipeline_config(settings, backends, metric, epsilon, settings.resolved_n_rewrites());

    Output out(output_path);
    if (!lengths.empty()) {
        const auto reports = dsipa::length_sweep(dataset, cfg, lengths, *backends.transformer,
                                                 *backends.scorer, settings.jobs);
        json rows = json::array();
        for (const auto& [length, report] : reports) {
            rows.push_back({{"length", length}, {"report", dsipa::report_to_json(report)}});
            std::cerr << "length " << length << ": ";
            print_report_summary(report);
        }
        out.stream() << json{{"lengths", rows}}.dump(2) << '\n';
    } else if (!ns.empty()) {
        const auto rows_map = dsipa::ablate_n(dataset, cfg, ns, *backends.transformer,
                                              *backends.scorer, backends.gateway.get(),
                                              settings.jobs);
        json rows = json::array();
        for (const auto& [n, row] : rows_map) {
            rows.push_back({{"n", n},
                            {"tokens_used", row.tokens_used},
                            {"report", dsipa::report_to_json(row.report)}});
            std::cerr << "n=" << n << " (tokens " << row.tokens_used << "): ";
            print_report_summary(row.report);
        }
        out.stream() << json{{"ns", rows}}.dump(2) << '\n';
    } else {
        const dsipa::EvaluationReport report =
            dsipa::evaluate(dataset, cfg, *backends.transformer, *backends.scorer, settings.jobs);
        print_report_summary(report);
        out.stream() << dsipa::report_to_json(report).dump(2) << '\n';
    }
    out.finish();
    return kExitOk;
}

int cmd_perturb(const Settings& settings, const std::string& input, MetricKind metric,
                double epsilon, const std::vector<double>& rates, std::uint64_t seed, bool both,
                const std::string& output_path) {
    const std::vector<TextSample> dataset = dsipa::load_dataset(input);
    const Backends backends = make_backends(settings);
    const dsipa::PipelineConfig cfg =
        make_pipeline_config(settings, backends, metric, epsilon, settings.resolved_n_rewrites());
    const auto reports = dsipa::perturbation_sweep(dataset, cfg, rates, seed,
                                                   *backends.transformer, *backends.scorer,
                                                   settings.jobs, both);
    json rows = json::array();
    for (const auto& [rate, report] : reports) {
        rows.push_back({{"rate", rate}, {"report", dsipa::report_to_json(report)}});
        std::cerr << "rate " << rate << ": ";
        print_report_summary(report);
    }
    Output out(output_path);
    out.stream() << json{{"seed", seed}, {"rates", rows}}.dump(2) << '\n';
    out.finish();
    return kExitOk;
}

int cmd_synth(int count, std::uint64_t seed, const std::string& output_path) {
    const std::vector<TextSample> corpus = dsipa::generate_synthetic_corpus(count, seed);
    if (output_path.empty()) {
        for (const TextSample& sample : corpus) {
            json obj;
            obj["id"] = sample.id;
            obj["text"] = sample.text;
            obj["label"] = to_string(*sample.label);
            obj["domain"] = *sample.domain;
            std::cout << obj.dump() << '\n';
        }
    } else {
        dsipa::save_dataset(output_path, corpus);
    }
    std::cerr << "wrote " << corpus.size() << " samples (seed " << seed << ")\n";
    return kExitOk;
}

int cmd_analyze_esr(const Settings& settings, const std::string& input,
                    const std::string& output_path) {
    const std::vector<TextSample> dataset = dsipa::load_dataset(input);
    const Backends backends = make_backends(settings);
    Output out(output_path);
    double human_sum = 0.0;
    double llm_sum = 0.0;
    std::size_t human_count = 0;
    std::size_t llm_count = 0;
    for (const TextSample& sample : dataset) {
        const dsipa::EsrResult result = dsipa::esr_for_sample(sample, *backends.scorer);
        json obj;
        obj["sample_id"] = result.sample_id;
        if (sample.label) obj["label"] = to_string(*sample.label);
        obj["esr"] = result.esr;
        obj["sentences"] = result.sentence_scores.size();
        out.stream() << obj.dump() << '\n';
        if (sample.label == Label::Human) {
            human_sum += result.esr;
            ++human_count;
        } else if (sample.label == Label::Llm) {
            llm_sum += result.esr;
            ++llm_count;
        }
    }
    out.finish();
    if (human_count > 0) {
        std::cerr << "mean ESR human: " << human_sum / static_cast<double>(human_count) << "\n";
    }
    if (llm_count > 0) {
        std::cerr << "mean ESR llm: " << llm_sum / static_cast<double>(llm_count) << "\n";
    }
    return kExitOk;
}

int cmd_analyze_kl(const Settings& settings, const std::string& input, MetricKind metric,
                   int bins, const std::string& output_path) {
    const std::vector<TextSample> dataset = dsipa::load_dataset(input);
    const Backends backends = make_backends(settings);
    const dsipa::PipelineConfig cfg =
        make_pipeline_config(settings, backends, metric, 0.0, settings.resolved_n_rewrites());
    const std::vector<dsipa::DetectionResult> results =
        dsipa::detect_all(dataset, cfg, *backends.transformer, *backends.scorer, settings.jobs);

    std::vector<double> human_scores;
    std::vector<double> llm_scores;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!dataset[i].label) continue;
        (*dataset[i].label == Label::Human ? human_scores : llm_scores)
            .push_back(results[i].report.dx);
    }
    if (human_scores.empty() || llm_scores.empty()) {
        throw std::runtime_error("kl analysis needs both classes in the input");
    }
    double hi = 0.0;
    for (double s : human_scores) hi = std::max(hi, s);
    for (double s : llm_scores) hi = std::max(hi, s);
    if (hi <= 0.0) hi = 1.0;
    const dsipa::Histogram human_hist = dsipa::histogram(human_scores, bins, {0.0, hi});
    const dsipa::Histogram llm_hist = dsipa::histogram(llm_scores, bins, {0.0, hi});

    json obj;
    obj["metric"] = to_string(metric);
    obj["bins"] = bins;
    obj["range"] = {0.0, hi};
    obj["kl_human_vs_llm"] = dsipa::kl_divergence(human_hist, llm_hist);
    obj["kl_llm_vs_human"] = dsipa::kl_divergence(llm_hist, human_hist);
    obj["human"] = {{"count", human_scores.size()},
                    {"bin_edges", human_hist.bin_edges},
                    {"masses", human_hist.masses}};
    obj["llm"] = {{"count", llm_scores.size()},
                  {"bin_edges", llm_hist.bin_edges},
                  {"masses", llm_hist.masses}};
    Output out(output_path);
    out.stream() << obj.dump(2) << '\n';
    out.finish();
    std::cerr << "KL(human || llm) = " << obj["kl_human_vs_llm"].get<double>() << "\n";
    return kExitOk;
}

int cmd_analyze_pc1(const Settings& settings, const std::string& input,
                    const std::string& output_path) {
    const std::vector<TextSample> dataset = dsipa::load_dataset(input);
    const Backends backends = make_backends(settings);
    std::vector<dsipa::SentimentVector> rows;
    rows.reserve(dataset.size());
    for (const TextSample& sample : dataset) {
        rows.push_back(backends.scorer->score(sample.text));
    }
    const std::vector<double> projections = dsipa::pc1_projection(rows);
    Output out(output_path);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        json obj;
        obj["sample_id"] = dataset[i].id;
        if (dataset[i].label) obj["label"] = to_string(*dataset[i].label);
        obj["projection"] = projections[i];
        out.stream() << obj.dump() << '\n';
    }
    out.finish();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DSIPA: detects LLM-generated text via sentiment-distribution divergence "
                 "under low-emotional rewriting"};
    app.require_subcommand(1);

    Settings settings;
    app.add_option("--config", settings.config_path,
                   "JSON config file (prompts, endpoint, model, cache_dir, jobs)");
    app.add_option("--cache-dir", settings.cache_dir, "response cache directory")
        ->capture_default_str();
    app.add_option("--jobs", settings.jobs, "worker pool size")->capture_default_str();
    app.add_option("--endpoint", settings.endpoint, "chat-completion endpoint base URL");
    app.add_option("--model", settings.model, "rewriter model name")->capture_default_str();
    app.add_option("--scorer-model", settings.scorer_model,
                   "sentiment scorer model (defaults to --model)");
    app.add_flag("--offline", settings.offline, "use the lexicon scorer and mock transformers");
    app.add_option("--transformer", settings.transformer,
                   "rewrite backend: strip|identity|jitter|remote (auto)");
    app.add_option("--jitter-seed", settings.jitter_seed, "seed for the jitter transformer");
    app.add_option("--rpm", settings.requests_per_minute, "gateway requests per minute")
        ->capture_default_str();
    app.add_option("--max-concurrent", settings.max_concurrent,
                   "gateway concurrent-request ceiling")
        ->capture_default_str();
    app.add_option("--n-rewrites", settings.n_rewrites,
                   "rewrite prompts to use (default: min(5, configured prompts))");

    // detect
    std::string in_path;
    std::string out_path;
    std::string metric_name;
    std::string threshold_file;
    double threshold = 0.0;
    CLI::App* detect = app.add_subcommand("detect", "classify samples as human or llm");
    detect->fallthrough();
    detect->add_option("--input", in_path, "JSONL dataset")->required();
    detect->add_option("--metric", metric_name, "sdc|sdp")->required();
    CLI::Option* thr_opt = detect->add_option("--threshold", threshold, "decision epsilon");
    thr_opt->excludes(detect->add_option("--threshold-file", threshold_file,
                                         "JSON file from calibrate"));
    detect->add_option("--output", out_path, "verdict JSONL (default stdout)");

    // calibrate
    bool per_domain = false;
    CLI::App* calibrate = app.add_subcommand("calibrate", "pick epsilon on a labeled set");
    calibrate->fallthrough();
    calibrate->add_option("--input", in_path, "labeled JSONL dataset")->required();
    calibrate->add_option("--metric", metric_name, "sdc|sdp")->required();
    calibrate->add_flag("--per-domain", per_domain, "also report per-domain thresholds");
    calibrate->add_option("--output", out_path, "calibration JSON (default stdout)");

    // evaluate
    std::vector<int> lengths;
    std::vector<int> ns;
    CLI::App* evaluate = app.add_subcommand("evaluate", "score a labeled dataset");
    evaluate->fallthrough();
    evaluate->add_option("--input", in_path, "labeled JSONL dataset")->required();
    evaluate->add_option("--metric", metric_name, "sdc|sdp")->required();
    CLI::Option* ev_thr_opt = evaluate->add_option("--threshold", threshold, "decision epsilon");
    ev_thr_opt->excludes(evaluate->add_option("--threshold-file", threshold_file,
                                              "JSON file from calibrate"));
    evaluate->add_option("--lengths", lengths, "token-truncation sweep")->delimiter(',');
    evaluate->add_option("--ns", ns, "rewrite-count ablation sweep")->delimiter(',');
    evaluate->add_option("--output", out_path, "report JSON (default stdout)");

    // perturb
    std::vector<double> rates;
    std::uint64_t perturb_seed = 42;
    bool perturb_both = false;
    CLI::App* perturb = app.add_subcommand("perturb", "word-perturbation robustness sweep");
    perturb->fallthrough();
    perturb->add_option("--input", in_path, "labeled JSONL dataset")->required();
    perturb->add_option("--metric", metric_name, "sdc|sdp")->required();
    CLI::Option* pb_thr_opt = perturb->add_option("--threshold", threshold, "decision epsilon");
    pb_thr_opt->excludes(perturb->add_option("--threshold-file", threshold_file,
                                             "JSON file from calibrate"));
    perturb->add_option("--rates", rates, "perturbation rates in [0,1]")
        ->required()
        ->delimiter(',');
    perturb->add_option("--seed", perturb_seed, "perturbation seed")->capture_default_str();
    perturb->add_flag("--both", perturb_both, "perturb both classes, not only llm");
    perturb->add_option("--output", out_path, "report JSON (default stdout)");

    // synth
    int synth_count = 0;
    std::uint64_t synth_seed = 42;
    CLI::App* synth = app.add_subcommand("synth", "generate the synthetic validation corpus");
    synth->fallthrough();
    synth->add_option("--count", synth_count, "samples per class")->required();
    synth->add_option("--seed", synth_seed, "corpus seed")->capture_default_str();
    synth->add_option("--output", out_path, "dataset JSONL (default stdout)");

    // analyze
    int kl_bins = 20;
    std::string kl_metric = "sdc";
    CLI::App* analyze = app.add_subcommand("analyze", "emit analysis data for plotting");
    analyze->fallthrough();
    analyze->require_subcommand(1);
    CLI::App* analyze_esr = analyze->add_subcommand("esr", "per-sample emotional shift rate");
    analyze_esr->fallthrough();
    analyze_esr->add_option("--input", in_path, "JSONL dataset")->required();
    analyze_esr->add_option("--output", out_path, "ESR JSONL (default stdout)");
    CLI::App* analyze_kl = analyze->add_subcommand("kl", "class-score histograms and KL");
    analyze_kl->fallthrough();
    analyze_kl->add_option("--input", in_path, "labeled JSONL dataset")->required();
    analyze_kl->add_option("--metric", kl_metric, "sdc|sdp")->capture_default_str();
    analyze_kl->add_option("--bins", kl_bins, "histogram bins")->capture_default_str();
    analyze_kl->add_option("--output", out_path, "analysis JSON (default stdout)");
    CLI::App* analyze_pc1 = analyze->add_subcommand("pc1", "first-principal-component projection");
    analyze_pc1->fallthrough();
    analyze_pc1->add_option("--input", in_path, "JSONL dataset")->required();
    analyze_pc1->add_option("--output", out_path, "projection JSONL (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        apply_config_file(settings, app);
        if (detect->parsed()) {
            const double eps =
                resolve_threshold(threshold, threshold_file, thr_opt->count() > 0);
            return cmd_detect(settings, in_path, dsipa::metric_kind_from_string(metric_name), eps,
                              out_path);
        }
        if (calibrate->parsed()) {
            return cmd_calibrate(settings, in_path, dsipa::metric_kind_from_string(metric_name),
                                 per_domain, out_path);
        }
        if (evaluate->parsed()) {
            const double eps =
                resolve_threshold(threshold, threshold_file, ev_thr_opt->count() > 0);
            return cmd_evaluate(settings, in_path, dsipa::metric_kind_from_string(metric_name),
                                eps, lengths, ns, out_path);
        }
        if (perturb->parsed()) {
            const double eps =
                resolve_threshold(threshold, threshold_file, pb_thr_opt->count() > 0);
            return cmd_perturb(settings, in_path, dsipa::metric_kind_from_string(metric_name), eps,
                               rates, perturb_seed, perturb_both, out_path);
        }
        if (synth->parsed()) {
            return cmd_synth(synth_count, synth_seed, out_path);
        }
        if (analyze->parsed()) {
            if (analyze_esr->parsed()) return cmd_analyze_esr(settings, in_path, out_path);
            if (analyze_kl->parsed()) {
                return cmd_analyze_kl(settings, in_path,
                                      dsipa::metric_kind_from_string(kl_metric), kl_bins,
                                      out_path);
            }
            if (analyze_pc1->parsed()) return cmd_analyze_pc1(settings, in_path, out_path);
        }
        std::cerr << "no subcommand selected\n";
        return kExitUsage;
    } catch (const UsageConflict& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
