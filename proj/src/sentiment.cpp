#include "dsipa/sentiment.hpp"

#include <cmath>

namespace dsipa {

SentimentVector LexiconScorer::score(const std::string& text) const {
    const std::vector<std::string> words = split_words(text);
    if (words.empty()) {
        throw std::invalid_argument("lexicon scorer: text has no words");
    }
    double n_pos = 0.0;
    double n_neg = 0.0;
    for (const std::string& word : words) {
        const int valence = lexicon_->token_valence(word);
        if (valence > 0) n_pos += 1.0;
        else if (valence < 0) n_neg += 1.0;
    }
    const double n_tot = static_cast<double>(words.size());
    const double n_neu = std::max(0.0, n_tot - n_pos - n_neg);
    return validate_vector({n_neg + 1.0, n_neu + 1.0, n_pos + 1.0});
}

SentimentVector lexicon_score(const std::string& text) {
    static const LexiconScorer scorer;
    return scorer.score(text);
}

std::vector<std::string> split_sentences(const std::string& text) {
    auto trim = [](const std::string& s) {
        const auto begin = s.find_first_not_of(" \t\r\n");
        if (begin == std::string::npos) return std::string();
        const auto end = s.find_last_not_of(" \t\r\n");
        return s.substr(begin, end - begin + 1);
    };

    std::vector<std::string> sentences;
    std::string current;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        current.push_back(c);
        const bool terminator = (c == '.' || c == '!' || c == '?');
        const bool at_end = (i + 1 == text.size());
        const bool boundary =
            terminator && (at_end || std::isspace(static_cast<unsigned char>(text[i + 1])));
        if (boundary) {
            std::string fragment = trim(current);
            if (!fragment.empty()) sentences.push_back(std::move(fragment));
            current.clear();
        }
    }
    std::string tail = trim(current);
    if (!tail.empty()) sentences.push_back(std::move(tail));
    if (sentences.empty()) {
        const std::string whole = trim(text);
        if (!whole.empty()) sentences.push_back(whole);
    }
    return sentences;
}

double polarity(const SentimentVector& v) {
    if (v.k() != 3) {
        throw std::invalid_argument("polarity: requires a 3-class vector, got k=" +
                                    std::to_string(v.k()));
    }
    return v[2] - v[0];
}

double emotional_shift_rate(const std::vector<double>& sentence_scores) {
    if (sentence_scores.empty()) {
        throw std::invalid_argument("emotional_shift_rate: empty score list");
    }
    for (double s : sentence_scores) {
        if (!(s >= -1.0 && s <= 1.0)) {
            throw std::invalid_argument("emotional_shift_rate: score outside [-1, 1]");
        }
    }
    const std::size_t n = sentence_scores.size();
    if (n == 1) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        total += std::abs(sentence_scores[i + 1] - sentence_scores[i]);
    }
    return total / static_cast<double>(n - 1);
}

EsrResult esr_for_sample(const TextSample& sample, const SentimentScorer& scorer) {
    EsrResult result;
    result.sample_id = sample.id;
    const std::vector<std::string> sentences = split_sentences(sample.text);
    result.sentence_scores.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        try {
            result.sentence_scores.push_back(polarity(scorer.score(sentences[i])));
        } catch (const std::exception& e) {
            throw std::runtime_error("sample " + sample.id + ", sentence " + std::to_string(i) +
                                     ": " + e.what());
        }
    }
    result.esr = emotional_shift_rate(result.sentence_scores);
    return result;
}

}  // namespace dsipa
