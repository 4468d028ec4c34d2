#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dsipa/lexicon.hpp"
#include "dsipa/types.hpp"

namespace dsipa {

// F2: maps a text to a sentiment probability vector. Implementations must be
// safe to call from multiple threads; deterministic backends return identical
// vectors for identical inputs.
class SentimentScorer {
public:
    virtual ~SentimentScorer() = default;
    virtual SentimentVector score(const std::string& text) const = 0;
    virtual std::string descriptor() const = 0;
};

// Deterministic offline scorer: counts case-folded lexicon hits, applies
// add-one smoothing over [negative, neutral, positive] counts.
class LexiconScorer : public SentimentScorer {
public:
    LexiconScorer() : lexicon_(&Lexicon::builtin()) {}
    explicit LexiconScorer(const Lexicon& lexicon) : lexicon_(&lexicon) {}

    SentimentVector score(const std::string& text) const override;
    std::string descriptor() const override { return "lexicon"; }

private:
    const Lexicon* lexicon_;
};

// Convenience wrapper over LexiconScorer with the built-in lexicon.
SentimentVector lexicon_score(const std::string& text);

// Splits on '.', '!' or '?' followed by whitespace or end of text, trimming
// fragments and dropping empties. Non-empty text always yields at least one
// sentence.
std::vector<std::string> split_sentences(const std::string& text);

// p_pos - p_neg of a 3-class vector, in [-1, 1].
double polarity(const SentimentVector& v);

// Mean absolute difference of adjacent scores; 0 for a single score.
double emotional_shift_rate(const std::vector<double>& sentence_scores);

struct EsrResult {
    std::string sample_id;
    std::vector<double> sentence_scores;
    double esr = 0.0;
};

// split_sentences -> score each sentence -> polarity -> emotional_shift_rate.
EsrResult esr_for_sample(const TextSample& sample, const SentimentScorer& scorer);

}  // namespace dsipa
