#include "dsipa/transform.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dsipa {

namespace {

struct WordSpan {
    std::size_t begin = 0;
    std::size_t length = 0;
};

std::vector<WordSpan> word_spans(const std::string& text) {
    std::vector<WordSpan> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        const std::size_t begin = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        spans.push_back({begin, i - begin});
    }
    return spans;
}

// Replaces the selected word spans in the original text, keeping every other
// byte (including whitespace runs) untouched.
std::string splice_words(const std::string& text, const std::vector<WordSpan>& spans,
                         const std::vector<std::pair<std::size_t, std::string>>& replacements) {
    std::string out;
    out.reserve(text.size() + 8);
    std::size_t cursor = 0;
    for (const auto& [index, word] : replacements) {
        const WordSpan& span = spans[index];
        out.append(text, cursor, span.begin - cursor);
        out.append(word);
        cursor = span.begin + span.length;
    }
    out.append(text, cursor, text.size() - cursor);
    return out;
}

// Uniform draw in [0, n) from the engine's raw output. mt19937_64 output is
// portable, unlike std::uniform_int_distribution.
std::size_t draw(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

std::string perturb_one_word(const std::string& word, std::mt19937_64& rng) {
    auto duplicate_at = [&](std::size_t i) {
        std::string w = word;
        w.insert(w.begin() + static_cast<std::ptrdiff_t>(i), word[i]);
        return w;
    };
    if (word.size() >= 2) {
        const std::size_t op = draw(rng, 3);
        if (op == 0) {
            const std::size_t i = draw(rng, word.size() - 1);
            std::string w = word;
            std::swap(w[i], w[i + 1]);
            if (w != word) return w;
        } else if (op == 1) {
            const std::size_t i = draw(rng, word.size());
            std::string w = word;
            w.erase(w.begin() + static_cast<std::ptrdiff_t>(i));
            if (w != word) return w;
        } else {
            return duplicate_at(draw(rng, word.size()));
        }
    }
    // Single characters, and swaps/deletions that landed on repeated
    // characters, fall back to duplication so the word always changes.
    return duplicate_at(0);
}

}  // namespace

std::uint64_t stable_hash64(const std::string& data) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string LexiconStripTransformer::transform(const std::string& text,
                                               const std::string&) const {
    if (text.empty()) throw std::invalid_argument("lexicon-strip: empty input");
    const std::vector<WordSpan> spans = word_spans(text);
    std::ostringstream out;
    bool first = true;
    for (const WordSpan& span : spans) {
        const std::string token = text.substr(span.begin, span.length);
        if (lexicon_->token_valence(token) != 0) continue;
        if (!first) out << ' ';
        out << token;
        first = false;
    }
    std::string result = out.str();
    // A text made entirely of lexicon words still has to produce output.
    if (result.empty()) return ".";
    return result;
}

std::string JitterTransformer::transform(const std::string& text,
                                         const std::string& instruction) const {
    if (text.empty()) throw std::invalid_argument("jitter: empty input");
    const std::vector<WordSpan> spans = word_spans(text);
    std::vector<std::size_t> hits;
    std::vector<int> valences;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        const int v = lexicon_->token_valence(text.substr(spans[i].begin, spans[i].length));
        if (v != 0) {
            hits.push_back(i);
            valences.push_back(v);
        }
    }
    if (hits.empty()) return text;

    std::mt19937_64 rng(seed_ ^ stable_hash64(text) ^
                        (stable_hash64(instruction) * 0x9e3779b97f4a7c15ULL));
    const std::size_t pick = draw(rng, hits.size());
    const std::size_t word_index = hits[pick];
    const std::vector<std::string>& counterparts =
        valences[pick] > 0 ? lexicon_->negative_words() : lexicon_->positive_words();
    const std::string& replacement = counterparts[draw(rng, counterparts.size())];
    return splice_words(text, spans, {{word_index, replacement}});
}

std::string rewrite_low_emotion(const std::string& text, const std::string& prompt,
                                const TextTransformer& transformer) {
    if (text.empty()) throw std::invalid_argument("rewrite: empty text");
    if (prompt.empty()) throw std::invalid_argument("rewrite: empty prompt");
    try {
        std::string result = transformer.transform(text, prompt);
        if (result.empty()) {
            throw std::runtime_error("transformer returned empty output");
        }
        return result;
    } catch (const std::exception& e) {
        throw std::runtime_error("rewrite with prompt \"" + prompt + "\" via " +
                                 transformer.descriptor() + " failed: " + e.what());
    }
}

std::string roundtrip_transform(const std::string& text, const InversePair& pair,
                                const TextTransformer& transformer) {
    if (pair.forward.empty() || pair.backward.empty()) {
        throw std::invalid_argument("roundtrip: inverse pair has an empty member");
    }
    std::string forward;
    try {
        forward = transformer.transform(text, pair.forward);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("roundtrip forward leg failed: ") + e.what());
    }
    try {
        return transformer.transform(forward, pair.backward);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("roundtrip backward leg failed: ") + e.what());
    }
}

std::string perturb_words(const std::string& text, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("perturb_words: rate must be in [0, 1]");
    }
    const std::vector<WordSpan> spans = word_spans(text);
    const std::size_t target =
        static_cast<std::size_t>(std::floor(rate * static_cast<double>(spans.size())));
    if (target == 0) return text;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> indices(spans.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    for (std::size_t i = 0; i < target; ++i) {
        const std::size_t j = i + draw(rng, indices.size() - i);
        std::swap(indices[i], indices[j]);
    }
    indices.resize(target);
    std::sort(indices.begin(), indices.end());

    std::vector<std::pair<std::size_t, std::string>> replacements;
    replacements.reserve(target);
    for (std::size_t index : indices) {
        const std::string word = text.substr(spans[index].begin, spans[index].length);
        replacements.emplace_back(index, perturb_one_word(word, rng));
    }
    return splice_words(text, spans, replacements);
}

std::string truncate_tokens(const std::string& text, int max_tokens) {
    if (max_tokens < 1) {
        throw std::invalid_argument("truncate_tokens: max_tokens must be >= 1");
    }
    const std::vector<std::string> words = split_words(text);
    const std::size_t keep = std::min(words.size(), static_cast<std::size_t>(max_tokens));
    std::string out;
    for (std::size_t i = 0; i < keep; ++i) {
        if (i > 0) out += ' ';
        out += words[i];
    }
    return out;
}

PromptSet default_prompt_set() {
    PromptSet prompts;
    prompts.rewrite_prompts = {
        "Rewrite this more straightforwardly.",
        "Polish this in a machine-like objective tone.",
        "Rewrite this objectively and without emotion.",
        "Paraphrase this in plain, factual language.",
        "Restate this content in a neutral, unemotional style.",
    };
    prompts.sentiment_prompt =
        "Analyze the sentiment of the following text. Respond with only a JSON object of the "
        "form {\"negative\": x, \"neutral\": y, \"positive\": z} where the values are "
        "probabilities that sum to 1.";
    prompts.inverse_pairs = {
        {"Please expand this paragraph without changing its meaning.",
         "Please abbreviate this paragraph without changing its meaning."},
        {"Please rewrite this in the third person while maintaining its meaning.",
         "Please rewrite this in the first person while maintaining its meaning."},
    };
    return prompts;
}

PromptSet load_prompt_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open prompt config: " + path);
    }
    nlohmann::json obj;
    try {
        in >> obj;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("prompt config " + path + ": " + e.what());
    }
    PromptSet prompts = default_prompt_set();
    if (obj.contains("rewrite_prompts")) {
        prompts.rewrite_prompts = obj["rewrite_prompts"].get<std::vector<std::string>>();
    }
    if (obj.contains("sentiment_prompt")) {
        prompts.sentiment_prompt = obj["sentiment_prompt"].get<std::string>();
    }
    if (obj.contains("inverse_pairs")) {
        prompts.inverse_pairs.clear();
        for (const auto& pair : obj["inverse_pairs"]) {
            prompts.inverse_pairs.push_back(
                {pair.at("forward").get<std::string>(), pair.at("backward").get<std::string>()});
        }
    }
    validate_prompt_set(prompts);
    return prompts;
}

}  // namespace dsipa
