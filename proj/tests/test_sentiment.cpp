#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

#include "dsipa/sentiment.hpp"

using namespace dsipa;

namespace {

// Independent recount: lowercase, strip edge punctuation, match against the
// given lists. Mirrors the documented contract, not the implementation.
std::array<int, 3> naive_counts(const std::string& text, const std::set<std::string>& pos,
                                const std::set<std::string>& neg) {
    int n_pos = 0;
    int n_neg = 0;
    int n_tot = 0;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        ++n_tot;
        std::size_t b = 0;
        std::size_t e = token.size();
        while (b < e && !std::isalnum(static_cast<unsigned char>(token[b]))) ++b;
        while (e > b && !std::isalnum(static_cast<unsigned char>(token[e - 1]))) --e;
        std::string w = token.substr(b, e - b);
        std::transform(w.begin(), w.end(), w.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (pos.count(w)) ++n_pos;
        else if (neg.count(w)) ++n_neg;
        token.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) flush();
        else token.push_back(c);
    }
    flush();
    return {n_neg, n_tot - n_pos - n_neg, n_pos};
}

}  // namespace

TEST_CASE("builtin lexicon is sizeable, disjoint and contains the fixture words") {
    const Lexicon& lex = Lexicon::builtin();
    CHECK(lex.positive_words().size() >= 190);
    CHECK(lex.negative_words().size() >= 190);
    for (const std::string& w : lex.positive_words()) {
        CHECK_FALSE(lex.is_negative(w));
    }
    CHECK(lex.is_positive("good"));
    CHECK(lex.is_negative("bad"));
}

TEST_CASE("lexicon loads from the shipped data files identically to the builtin") {
    const Lexicon files = Lexicon::from_files(std::string(DSIPA_DATA_DIR) + "/positive_words.txt",
                                              std::string(DSIPA_DATA_DIR) + "/negative_words.txt");
    CHECK(files.positive_words() == Lexicon::builtin().positive_words());
    CHECK(files.negative_words() == Lexicon::builtin().negative_words());
}

TEST_CASE("token normalization folds case and strips edge punctuation") {
    CHECK(normalize_token("Lovely.") == "lovely");
    CHECK(normalize_token("\"GOOD\"") == "good");
    CHECK(normalize_token("...") == "");
    CHECK(normalize_token("it's") == "it's");
}

TEST_CASE("lexicon_score applies add-one smoothing to zero hits") {
    // 8 words, none in the lexicon -> [1, 9, 1] / 11
    const SentimentVector v = lexicon_score("the report on the table near the window");
    CHECK(v[0] == doctest::Approx(1.0 / 11.0));
    CHECK(v[1] == doctest::Approx(9.0 / 11.0));
    CHECK(v[2] == doctest::Approx(1.0 / 11.0));
}

TEST_CASE("lexicon_score counts direct hits") {
    // 2 pos, 1 neg, 0 neutral -> [(1+1), (0+1), (2+1)] / 6
    const SentimentVector v = lexicon_score("good good bad");
    CHECK(v[0] == doctest::Approx(1.0 / 3.0));
    CHECK(v[1] == doctest::Approx(1.0 / 6.0));
    CHECK(v[2] == doctest::Approx(1.0 / 2.0));
}

TEST_CASE("lexicon_score matches case-insensitively through punctuation") {
    const SentimentVector plain = lexicon_score("good bad table");
    const SentimentVector decorated = lexicon_score("Good! bad, table.");
    CHECK(plain.components() == decorated.components());
}

TEST_CASE("lexicon_score errors on empty text") {
    CHECK_THROWS_AS(lexicon_score("   "), std::invalid_argument);
}

TEST_CASE("lexicon_score is pure") {
    const std::string text = "a lovely day with terrible weather";
    CHECK(lexicon_score(text).components() == lexicon_score(text).components());
}

TEST_CASE("lexicon_score equals an independent recount on random word soups") {
    const Lexicon& lex = Lexicon::builtin();
    const std::set<std::string> pos(lex.positive_words().begin(), lex.positive_words().end());
    const std::set<std::string> neg(lex.negative_words().begin(), lex.negative_words().end());
    std::vector<std::string> pool = {"table", "road",  "Good",  "bad!",  "lovely", "ugly,",
                                     "the",   "stone", "GREAT", "awful", "paper",  "flat"};
    std::mt19937 rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 20);
        std::string text;
        for (int i = 0; i < n; ++i) {
            if (i > 0) text += ' ';
            text += pool[rng() % pool.size()];
        }
        const auto [n_neg, n_neu, n_pos] = naive_counts(text, pos, neg);
        const double total = static_cast<double>(n_neg + n_neu + n_pos) + 3.0;
        const SentimentVector v = lexicon_score(text);
        CHECK(v[0] == doctest::Approx((n_neg + 1) / total).epsilon(1e-12));
        CHECK(v[1] == doctest::Approx((n_neu + 1) / total).epsilon(1e-12));
        CHECK(v[2] == doctest::Approx((n_pos + 1) / total).epsilon(1e-12));
    }
}

TEST_CASE("split_sentences handles terminators, fallbacks and trailing fragments") {
    CHECK(split_sentences("A. B! C?") == std::vector<std::string>{"A.", "B!", "C?"});
    CHECK(split_sentences("no punctuation here") ==
          std::vector<std::string>{"no punctuation here"});
    CHECK(split_sentences("Mixed. case! run") ==
          std::vector<std::string>{"Mixed.", "case!", "run"});
    CHECK(split_sentences("Version 2.5 shipped. Yes.") ==
          std::vector<std::string>{"Version 2.5 shipped.", "Yes."});
    CHECK_FALSE(split_sentences("   x   ").empty());
}

TEST_CASE("polarity maps reference vectors") {
    CHECK(polarity(validate_vector({0.05, 0.20, 0.75})) == doctest::Approx(0.70));
    CHECK(polarity(validate_vector({1.0 / 3, 1.0 / 3, 1.0 / 3})) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(polarity(validate_vector({0.72, 0.22, 0.06})) == doctest::Approx(-0.66));
    CHECK_THROWS_AS(polarity(validate_vector({0.5, 0.5})), std::invalid_argument);
}

TEST_CASE("emotional_shift_rate closed forms") {
    CHECK(emotional_shift_rate({0.5, 0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(emotional_shift_rate({-1.0, 1.0, -1.0}) == doctest::Approx(2.0));
    CHECK(emotional_shift_rate({0.1, 0.4, 0.2, 0.9}) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(emotional_shift_rate({0.3}) == 0.0);
    CHECK_THROWS_AS(emotional_shift_rate({}), std::invalid_argument);
    CHECK_THROWS_AS(emotional_shift_rate({0.5, 1.5}), std::invalid_argument);
}

TEST_CASE("emotional_shift_rate is sign-flip invariant and bounded by 2") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 12);
        std::vector<double> scores;
        std::vector<double> flipped;
        for (int i = 0; i < n; ++i) {
            scores.push_back(uniform(rng));
            flipped.push_back(-scores.back());
        }
        const double esr = emotional_shift_rate(scores);
        CHECK(esr == doctest::Approx(emotional_shift_rate(flipped)).epsilon(1e-12));
        CHECK(esr <= 2.0);
        CHECK(esr >= 0.0);
    }
}

TEST_CASE("esr_for_sample composes the pipeline") {
    const LexiconScorer scorer;

    TextSample single{"s1", "Just one sentence here.", std::nullopt, std::nullopt, std::nullopt};
    CHECK(esr_for_sample(single, scorer).esr == 0.0);

    TextSample constant{"s2", "the table stands. the table stands. the table stands.",
                        std::nullopt, std::nullopt, std::nullopt};
    CHECK(esr_for_sample(constant, scorer).esr == doctest::Approx(0.0));

    // Hand-composed: three sentences scored one by one.
    TextSample mixed{"s3", "Lovely wonderful day. The road was flat. Awful terrible mess.",
                     std::nullopt, std::nullopt, std::nullopt};
    const std::vector<std::string> sentences = split_sentences(mixed.text);
    REQUIRE(sentences.size() == 3);
    std::vector<double> expected_scores;
    for (const std::string& sentence : sentences) {
        expected_scores.push_back(polarity(scorer.score(sentence)));
    }
    const EsrResult result = esr_for_sample(mixed, scorer);
    CHECK(result.sample_id == "s3");
    REQUIRE(result.sentence_scores.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(result.sentence_scores[i] == doctest::Approx(expected_scores[i]));
    }
    CHECK(result.esr == doctest::Approx(emotional_shift_rate(expected_scores)));
    CHECK(result.esr > 0.0);
}

TEST_CASE("esr_for_sample attaches the sentence index to scorer failures") {
    struct FailingScorer : SentimentScorer {
        SentimentVector score(const std::string& text) const override {
            if (text.find("boom") != std::string::npos) throw std::runtime_error("scorer down");
            return validate_vector({1.0, 1.0, 1.0});
        }
        std::string descriptor() const override { return "failing"; }
    } scorer;
    TextSample sample{"s4", "Fine start. boom here. never reached.", std::nullopt, std::nullopt,
                      std::nullopt};
    CHECK_THROWS_WITH_AS(esr_for_sample(sample, scorer), doctest::Contains("sentence 1"),
                         std::runtime_error);
}
