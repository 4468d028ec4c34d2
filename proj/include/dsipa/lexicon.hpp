#pragma once

#include <string>
#include <unordered_set>
#include <vector>

namespace dsipa {

// Valence word lists used by the offline scorer and the mock transformers.
// Matching is case-insensitive and ignores leading/trailing punctuation on
// the whitespace-delimited token; tokenization itself is whitespace-only.
class Lexicon {
public:
    // The built-in frozen lists (~200 words per polarity).
    static const Lexicon& builtin();

    // Plain-text lists, one word per line, UTF-8; blank lines ignored.
    static Lexicon from_files(const std::string& positive_path, const std::string& negative_path);

    static Lexicon from_words(std::vector<std::string> positive, std::vector<std::string> negative);

    bool is_positive(const std::string& word) const { return positive_set_.count(word) > 0; }
    bool is_negative(const std::string& word) const { return negative_set_.count(word) > 0; }

    // -1 negative hit, +1 positive hit, 0 otherwise, for a raw whitespace
    // token (normalized internally).
    int token_valence(const std::string& token) const;

    // Sorted word lists, for deterministic indexed access.
    const std::vector<std::string>& positive_words() const { return positive_words_; }
    const std::vector<std::string>& negative_words() const { return negative_words_; }

private:
    Lexicon() = default;
    std::unordered_set<std::string> positive_set_;
    std::unordered_set<std::string> negative_set_;
    std::vector<std::string> positive_words_;
    std::vector<std::string> negative_words_;
};

// Lowercases and strips leading/trailing non-alphanumeric characters; the
// normalization applied to a token before lexicon lookup.
std::string normalize_token(const std::string& token);

// Whitespace-delimited tokens of the text, in order.
std::vector<std::string> split_words(const std::string& text);

}  // namespace dsipa
