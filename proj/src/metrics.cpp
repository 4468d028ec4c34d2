#include "dsipa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dsipa {

double log_l1(const SentimentVector& a, const SentimentVector& b) {
    if (a.k() != b.k()) {
        throw std::invalid_argument("log_l1: dimension mismatch (" + std::to_string(a.k()) +
                                    " vs " + std::to_string(b.k()) + ")");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < a.k(); ++j) {
        total += std::abs(std::log(a[j]) - std::log(b[j]));
    }
    return total;
}

double sdc(const SentimentProfile& profile) {
    if (profile.rewrites.empty()) {
        throw std::invalid_argument("sdc: profile has no rewrites");
    }
    double total = 0.0;
    for (const PromptVector& rewrite : profile.rewrites) {
        total += log_l1(profile.original, rewrite.vector);
    }
    return total / static_cast<double>(profile.rewrites.size());
}

double sdp(const SentimentProfile& profile) {
    if (profile.roundtrips.empty()) {
        throw std::invalid_argument("sdp: profile has no roundtrips");
    }
    double total = 0.0;
    for (const PromptVector& roundtrip : profile.roundtrips) {
        total += log_l1(profile.original, roundtrip.vector);
    }
    return total / static_cast<double>(profile.roundtrips.size());
}

DivergenceReport divergence_score(const SentimentProfile& profile, MetricKind kind) {
    DivergenceReport report;
    report.metric_kind = kind;
    if (profile.rewrites.empty()) {
        throw std::invalid_argument("divergence_score: profile has no rewrites");
    }
    if (kind == MetricKind::Sdp && profile.roundtrips.empty()) {
        throw std::invalid_argument("divergence_score: metric sdp requires roundtrips");
    }
    report.per_prompt_l1.reserve(profile.rewrites.size());
    for (const PromptVector& rewrite : profile.rewrites) {
        report.per_prompt_l1.push_back(log_l1(profile.original, rewrite.vector));
    }
    report.sdc = sdc(profile);
    if (!profile.roundtrips.empty()) {
        report.per_prompt_l2.reserve(profile.roundtrips.size());
        for (const PromptVector& roundtrip : profile.roundtrips) {
            report.per_prompt_l2.push_back(log_l1(profile.original, roundtrip.vector));
        }
        report.sdp = sdp(profile);
    }
    report.dx = (kind == MetricKind::Sdc) ? report.sdc : *report.sdp;

    const std::size_t k = profile.original.k();
    report.mean_log_ratio.assign(k, 0.0);
    for (const PromptVector& rewrite : profile.rewrites) {
        for (std::size_t j = 0; j < k; ++j) {
            report.mean_log_ratio[j] += std::log(rewrite.vector[j]);
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        report.mean_log_ratio[j] = std::log(profile.original[j]) -
                                   report.mean_log_ratio[j] / static_cast<double>(profile.rewrites.size());
    }
    return report;
}

Label classify(double dx, double epsilon) {
    return dx < epsilon ? Label::Llm : Label::Human;
}

Histogram histogram(const std::vector<double>& samples, int bins, std::pair<double, double> range) {
    if (samples.empty()) throw std::invalid_argument("histogram: no samples");
    if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
    const auto [lo, hi] = range;
    if (!(lo < hi)) throw std::invalid_argument("histogram: require lo < hi");

    Histogram h;
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) {
        h.bin_edges[static_cast<std::size_t>(b)] = lo + width * b;
    }
    h.bin_edges.back() = hi;

    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double x : samples) {
        if (!std::isfinite(x)) throw std::invalid_argument("histogram: non-finite sample");
        const double idx = std::floor((x - lo) / width);
        int b = 0;
        if (idx >= static_cast<double>(bins)) b = bins - 1;
        else if (idx > 0.0) b = static_cast<int>(idx);
        counts[static_cast<std::size_t>(b)] += 1.0;
    }
    h.masses.resize(counts.size());
    const double total = static_cast<double>(samples.size());
    for (std::size_t b = 0; b < counts.size(); ++b) h.masses[b] = counts[b] / total;
    return h;
}

double kl_divergence(const Histogram& p, const Histogram& q) {
    if (p.bin_edges != q.bin_edges) {
        throw std::invalid_argument("kl_divergence: histograms have different bin edges");
    }
    // KL of a distribution against itself is 0 by definition; short-circuit so
    // the q-flooring below cannot introduce rounding noise in that case.
    if (p.masses == q.masses) return 0.0;

    std::vector<double> q_floored(q.masses.size());
    double q_sum = 0.0;
    for (std::size_t b = 0; b < q.masses.size(); ++b) {
        q_floored[b] = std::max(q.masses[b], 1e-9);
        q_sum += q_floored[b];
    }
    double div = 0.0;
    for (std::size_t b = 0; b < p.masses.size(); ++b) {
        if (p.masses[b] > 0.0) {
            div += p.masses[b] * std::log(p.masses[b] / (q_floored[b] / q_sum));
        }
    }
    return div;
}

namespace {

// Dominant eigenvector of a symmetric k x k matrix by power iteration.
// Returns the zero vector when the matrix is (numerically) zero.
std::vector<double> dominant_eigenvector(const std::vector<std::vector<double>>& m) {
    const std::size_t k = m.size();
    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) trace += m[i][i];
    if (trace <= 1e-30) return std::vector<double>(k, 0.0);

    std::vector<double> v(k, 0.0);
    v[0] = 1.0;
    std::mt19937 rng(2024);
    const int max_iters = 10000;
    const double tol = 1e-10;

    auto apply = [&](const std::vector<double>& x) {
        std::vector<double> y(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) y[i] += m[i][j] * x[j];
        }
        return y;
    };
    auto norm = [](const std::vector<double>& x) {
        double s = 0.0;
        for (double c : x) s += c * c;
        return std::sqrt(s);
    };
    auto randomize = [&] {
        for (double& c : v) {
            c = static_cast<double>(rng()) / static_cast<double>(std::mt19937::max()) - 0.5;
        }
        const double n = norm(v);
        for (double& c : v) c /= n;
    };

    for (int iter = 0; iter < max_iters; ++iter) {
        std::vector<double> w = apply(v);
        // Rayleigh quotient relative to the trace; a start vector stuck in the
        // null space is re-randomized from the fixed seed.
        double rayleigh = 0.0;
        for (std::size_t i = 0; i < k; ++i) rayleigh += v[i] * w[i];
        if (rayleigh <= trace * 1e-14) {
            randomize();
            continue;
        }
        const double wn = norm(w);
        for (double& c : w) c /= wn;
        double delta = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            delta = std::max(delta, std::abs(std::abs(w[i]) - std::abs(v[i])));
        }
        v = std::move(w);
        if (delta < tol) break;
    }

    for (double c : v) {
        if (std::abs(c) > 1e-12) {
            if (c < 0.0) {
                for (double& x : v) x = -x;
            }
            break;
        }
    }
    return v;
}

}  // namespace

std::vector<double> pc1_projection(const std::vector<SentimentVector>& rows) {
    if (rows.size() < 2) {
        throw std::invalid_argument("pc1_projection: need at least 2 rows");
    }
    const std::size_t k = rows.front().k();
    for (const SentimentVector& row : rows) {
        if (row.k() != k) throw std::invalid_argument("pc1_projection: rows differ in k");
    }
    const double n = static_cast<double>(rows.size());

    std::vector<double> mean(k, 0.0);
    for (const SentimentVector& row : rows) {
        for (std::size_t j = 0; j < k; ++j) mean[j] += row[j];
    }
    for (double& c : mean) c /= n;

    std::vector<std::vector<double>> centered(rows.size(), std::vector<double>(k));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < k; ++j) centered[i][j] = rows[i][j] - mean[j];
    }

    std::vector<std::vector<double>> cov(k, std::vector<double>(k, 0.0));
    for (const std::vector<double>& row : centered) {
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) cov[a][b] += row[a] * row[b];
        }
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) cov[a][b] /= n;
    }

    const std::vector<double> axis = dominant_eigenvector(cov);
    std::vector<double> projections(rows.size(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < k; ++j) projections[i] += centered[i][j] * axis[j];
    }
    return projections;
}

CalibrationResult calibrate_threshold(const std::vector<double>& scores,
                                      const std::vector<Label>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("calibrate_threshold: scores/labels length mismatch");
    }
    if (scores.size() < 2) {
        throw std::invalid_argument("calibrate_threshold: need at least 2 scored samples");
    }
    bool has_llm = false;
    bool has_human = false;
    for (Label l : labels) (l == Label::Llm ? has_llm : has_human) = true;
    if (!has_llm || !has_human) {
        throw std::invalid_argument("calibrate_threshold: both classes must be present");
    }

    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<double> candidates;
    candidates.push_back(sorted.front() - 1.0);
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    }
    candidates.push_back(sorted.back() + 1.0);

    CalibrationResult best;
    best.f1_at_epsilon = -1.0;
    std::vector<Label> predicted(scores.size());
    for (double eps : candidates) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            predicted[i] = classify(scores[i], eps);
        }
        const double f1 = f1_score(predicted, labels);
        if (f1 > best.f1_at_epsilon) {
            best.f1_at_epsilon = f1;
            best.epsilon = eps;
        }
    }
    best.candidates_evaluated = static_cast<int>(candidates.size());
    return best;
}

double f1_score(const std::vector<Label>& predicted, const std::vector<Label>& actual) {
    if (predicted.size() != actual.size()) {
        throw std::invalid_argument("f1_score: length mismatch");
    }
    if (predicted.empty()) {
        throw std::invalid_argument("f1_score: empty input");
    }
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool pred_llm = predicted[i] == Label::Llm;
        const bool is_llm = actual[i] == Label::Llm;
        if (pred_llm && is_llm) tp += 1.0;
        else if (pred_llm && !is_llm) fp += 1.0;
        else if (!pred_llm && is_llm) fn += 1.0;
    }
    const double denom = 2.0 * tp + fp + fn;
    if (denom == 0.0) return 0.0;
    return 2.0 * tp / denom;
}

double std_dev(const std::vector<double>& values) {
    if (values.size() < 2) {
        throw std::invalid_argument("std_dev: need at least 2 values");
    }
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n);
}

}  // namespace dsipa
