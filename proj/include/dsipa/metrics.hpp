#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dsipa/types.hpp"

namespace dsipa {

// Sum_j |ln a_j - ln b_j| over components, in nats. Both vectors must share
// the same k. This is the per-rewrite distance that SDC and SDP average.
double log_l1(const SentimentVector& a, const SentimentVector& b);

// Mean log_l1(original, rewrite) over all rewrites. Throws when rewrites is
// empty.
double sdc(const SentimentProfile& profile);

// Mean log_l1(original, roundtrip) over all roundtrips. Throws when
// roundtrips is empty.
double sdp(const SentimentProfile& profile);

// Builds the full per-prompt report and selects dx according to kind.
DivergenceReport divergence_score(const SentimentProfile& profile, MetricKind kind);

// Llm iff dx < epsilon (strict); Human otherwise.
Label classify(double dx, double epsilon);

struct Histogram {
    std::vector<double> bin_edges;  // B + 1 strictly increasing edges
    std::vector<double> masses;     // B masses summing to 1
};

// Uniform-width bins over [lo, hi]; out-of-range values are clamped into the
// edge bins. Throws on empty samples, bins < 1 or lo >= hi.
Histogram histogram(const std::vector<double>& samples, int bins, std::pair<double, double> range);

// Sum_b p_b ln(p_b / q_b) over bins with p_b > 0, after flooring q masses at
// 1e-9 and renormalizing q. Identical histograms yield exactly 0. Throws on
// bin-edge mismatch.
double kl_divergence(const Histogram& p, const Histogram& q);

// Projects each row onto the dominant eigenvector of the k x k covariance of
// the centered rows, found by power iteration (tolerance 1e-10, at most
// 10000 iterations, deterministic start). The eigenvector's first nonzero
// component is taken positive. Identical rows give all-zero projections.
std::vector<double> pc1_projection(const std::vector<SentimentVector>& rows);

struct CalibrationResult {
    double epsilon = 0.0;
    double f1_at_epsilon = 0.0;
    int candidates_evaluated = 0;
};

// Sweeps midpoints of consecutive distinct sorted scores plus one candidate
// below the minimum and one above the maximum; returns the epsilon maximizing
// F1 of classify(., epsilon) with Llm as the positive class, ties broken
// toward the smallest epsilon. Throws unless both classes are present and
// lengths match with at least 2 entries.
CalibrationResult calibrate_threshold(const std::vector<double>& scores,
                                      const std::vector<Label>& labels);

// F1 with Llm as the positive class; 0 when precision + recall is 0.
double f1_score(const std::vector<Label>& predicted, const std::vector<Label>& actual);

// Population standard deviation (divide by n). Requires at least 2 values.
double std_dev(const std::vector<double>& values);

}  // namespace dsipa
