#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "dsipa/lexicon.hpp"
#include "dsipa/types.hpp"

namespace dsipa {

// F1 and the inverse-pair maps: rewrites a text under an instruction.
// Implementations must tolerate concurrent calls and return non-empty output
// for non-empty input.
class TextTransformer {
public:
    virtual ~TextTransformer() = default;
    virtual std::string transform(const std::string& text, const std::string& instruction) const = 0;
    virtual std::string descriptor() const = 0;
};

class IdentityTransformer : public TextTransformer {
public:
    std::string transform(const std::string& text, const std::string&) const override {
        return text;
    }
    std::string descriptor() const override { return "identity"; }
};

// Removes every token whose normalized form is in the lexicon, preserving the
// order of the remaining tokens. Stands in for low-emotional rewriting in
// offline mode.
class LexiconStripTransformer : public TextTransformer {
public:
    LexiconStripTransformer() : lexicon_(&Lexicon::builtin()) {}
    explicit LexiconStripTransformer(const Lexicon& lexicon) : lexicon_(&lexicon) {}

    std::string transform(const std::string& text, const std::string& instruction) const override;
    std::string descriptor() const override { return "lexicon-strip"; }

private:
    const Lexicon* lexicon_;
};

// Swaps one lexicon word for a word of the opposite valence class, chosen
// deterministically from (text, instruction, seed). Texts without lexicon
// words pass through unchanged.
class JitterTransformer : public TextTransformer {
public:
    explicit JitterTransformer(std::uint64_t seed)
        : lexicon_(&Lexicon::builtin()), seed_(seed) {}
    JitterTransformer(const Lexicon& lexicon, std::uint64_t seed)
        : lexicon_(&lexicon), seed_(seed) {}

    std::string transform(const std::string& text, const std::string& instruction) const override;
    std::string descriptor() const override { return "jitter"; }

private:
    const Lexicon* lexicon_;
    std::uint64_t seed_;
};

// x' = F1(x | p_i). Wraps transformer failures with the prompt id and backend
// descriptor.
std::string rewrite_low_emotion(const std::string& text, const std::string& prompt,
                                const TextTransformer& transformer);

// x* = inverse(forward(x)): applies the pair's forward then backward
// instruction. Failures name the leg.
std::string roundtrip_transform(const std::string& text, const InversePair& pair,
                                const TextTransformer& transformer);

// Seeded character-level perturbation of floor(rate * word_count) words,
// one of {adjacent swap, delete char, duplicate char} each; word count, word
// order and all whitespace are preserved, and every selected word changes.
std::string perturb_words(const std::string& text, double rate, std::uint64_t seed);

// First max_tokens whitespace-delimited words, joined by single spaces.
std::string truncate_tokens(const std::string& text, int max_tokens);

// FNV-1a, used wherever a seed has to be derived from a string without
// depending on std::hash's implementation.
std::uint64_t stable_hash64(const std::string& data);

// The built-in prompt set: five low-emotional rewrite prompts, the sentiment
// analysis prompt and two inverse pairs.
PromptSet default_prompt_set();

// JSON file with keys rewrite_prompts (list of strings), sentiment_prompt
// (string) and inverse_pairs (list of {forward, backward}); missing keys fall
// back to the built-in defaults.
PromptSet load_prompt_set(const std::string& path);

}  // namespace dsipa
