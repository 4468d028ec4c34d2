#include "dsipa/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dsipa {

namespace {

// Frozen built-in valence lists. Tests reference individual entries only via
// fixtures that declare their own hits.
const char* const kPositiveWords[] = {
    "admirable", "admire", "adorable", "affectionate", "agreeable", "amazing", "appealing",
    "appreciated", "attractive", "awesome", "beautiful", "best", "better", "blissful",
    "breathtaking", "bright", "brilliant", "calm", "captivating", "charming", "cheerful",
    "cherished", "classy", "clean", "clever", "comfortable", "commendable", "compassionate",
    "confident", "considerate", "courageous", "courteous", "cozy", "creative", "cute",
    "dazzling", "dedicated", "delicious", "delight", "delighted", "delightful", "dependable",
    "devoted", "divine", "eager", "earnest", "ecstatic", "effective", "efficient", "elated",
    "elegant", "enchanting", "encouraging", "energetic", "engaging", "enjoy", "enjoyable",
    "enjoyed", "enthusiastic", "euphoric", "excellent", "exceptional", "excited", "exciting",
    "exquisite", "fabulous", "fair", "faithful", "fantastic", "fascinating", "favorite",
    "fine", "flawless", "flourishing", "fond", "fortunate", "fresh", "friendly", "fun",
    "funny", "generous", "gentle", "genuine", "gifted", "glad", "glorious", "glowing",
    "good", "gorgeous", "graceful", "gracious", "grand", "grateful", "great", "handsome",
    "happy", "harmonious", "healthy", "heartwarming", "heavenly", "helpful", "heroic",
    "honest", "honorable", "hopeful", "humorous", "ideal", "impressive", "incredible",
    "innovative", "inspired", "inspiring", "intelligent", "inviting", "jolly", "joy",
    "joyful", "jubilant", "keen", "kind", "legendary", "likable", "lively", "love",
    "loved", "lovely", "loving", "loyal", "lucky", "luminous", "luxurious", "magical",
    "magnificent", "marvelous", "masterful", "memorable", "merry", "mighty", "miraculous",
    "neat", "nice", "noble", "nurturing", "optimistic", "outstanding", "passionate",
    "peaceful", "perfect", "phenomenal", "playful", "pleasant", "pleased", "pleasing",
    "pleasure", "polished", "popular", "positive", "praiseworthy", "precious", "premium",
    "pretty", "prosperous", "proud", "radiant", "refined", "refreshing", "reliable",
    "remarkable", "resilient", "rewarding", "rich", "robust", "romantic", "safe", "satisfied",
    "satisfying", "sensational", "serene", "sharp", "shiny", "skillful", "smart", "smooth",
    "sparkling", "spectacular", "splendid", "stellar", "strong", "stunning", "stylish",
    "sublime", "succeed", "success", "successful", "sunny", "superb", "superior",
    "supportive", "supreme", "sweet", "talented", "tasty", "tender", "terrific", "thankful",
    "thoughtful", "thrilled", "thrilling", "thriving", "tidy", "tranquil", "triumphant",
    "trusted", "trustworthy", "truthful", "upbeat", "uplifting", "valiant", "valuable",
    "versatile", "vibrant", "victorious", "vivid", "warm", "welcoming", "wholesome",
    "winning", "wise", "witty", "wonderful", "worthy", "zealous",
};

const char* const kNegativeWords[] = {
    "abusive", "afraid", "aggressive", "angry", "annoyed", "annoying", "anxious", "appalling",
    "arrogant", "ashamed", "atrocious", "awful", "bad", "bitter", "bland", "bleak", "boring",
    "broken", "brutal", "careless", "catastrophic", "chaotic", "cheap", "clumsy", "cold",
    "collapse", "confused", "confusing", "corrupt", "cramped", "creepy", "crisis", "cruel",
    "crumbling", "crying", "cursed", "damaged", "dangerous", "deadly", "deceitful", "defeated",
    "defective", "deplorable", "depressed", "depressing", "desperate", "despair", "dire",
    "dirty", "disappointed", "disappointing", "disastrous", "disgusting", "dishonest",
    "dismal", "distressing", "disturbing", "doomed", "dreadful", "dreary", "dull", "dumb",
    "eerie", "embarrassed", "embarrassing", "enraged", "evil", "exhausted", "exhausting",
    "fail", "failed", "failing", "failure", "fake", "faulty", "fearful", "feeble", "filthy",
    "flawed", "foolish", "foul", "fragile", "fraudulent", "frightening", "frustrated",
    "frustrating", "furious", "gloomy", "grief", "grim", "gross", "harmful", "harsh",
    "hate", "hated", "hateful", "haunted", "heartbreaking", "helpless", "hideous", "hopeless",
    "horrible", "horrid", "horrific", "horror", "hostile", "humiliated", "humiliating",
    "hurt", "hurtful", "ignorant", "inadequate", "incompetent", "inferior", "insulting",
    "irritated", "irritating", "jealous", "lame", "lazy", "lonely", "lost", "lousy",
    "mean", "mediocre", "menacing", "messy", "miserable", "misery", "monstrous", "mourning",
    "nasty", "nightmare", "noisy", "obnoxious", "offensive", "outraged", "overpriced",
    "painful", "panic", "pathetic", "pitiful", "pointless", "poisonous", "poor", "regret",
    "regretful", "reckless", "repulsive", "resentful", "rotten", "rude", "ruin", "ruined",
    "sad", "sadness", "savage", "scared", "scary", "selfish", "shabby", "shameful",
    "shoddy", "sinister", "sloppy", "slow", "sorrow", "sorry", "sour", "stale", "stressful",
    "stupid", "suspicious", "tedious", "terrible", "terrified", "terrifying", "threatening",
    "tiresome", "toxic", "tragedy", "tragic", "trouble", "troubled", "ugly", "unbearable",
    "uncomfortable", "unfair", "unfortunate", "unhappy", "unjust", "unlucky", "unpleasant",
    "unreliable", "unstable", "upset", "useless", "vicious", "vile", "violent", "wasteful",
    "weak", "weary", "wicked", "worried", "worry", "worse", "worst", "worthless", "wretched",
};

std::vector<std::string> read_word_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open lexicon file: " + path);
    }
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::string word = normalize_token(line);
        if (!word.empty()) words.push_back(std::move(word));
    }
    return words;
}

}  // namespace

std::string normalize_token(const std::string& token) {
    std::size_t begin = 0;
    std::size_t end = token.size();
    while (begin < end && !std::isalnum(static_cast<unsigned char>(token[begin]))) ++begin;
    while (end > begin && !std::isalnum(static_cast<unsigned char>(token[end - 1]))) --end;
    std::string out = token.substr(begin, end - begin);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::istringstream stream(text);
    std::string word;
    while (stream >> word) words.push_back(std::move(word));
    return words;
}

Lexicon Lexicon::from_words(std::vector<std::string> positive, std::vector<std::string> negative) {
    Lexicon lex;
    lex.positive_words_ = std::move(positive);
    lex.negative_words_ = std::move(negative);
    std::sort(lex.positive_words_.begin(), lex.positive_words_.end());
    std::sort(lex.negative_words_.begin(), lex.negative_words_.end());
    lex.positive_words_.erase(
        std::unique(lex.positive_words_.begin(), lex.positive_words_.end()),
        lex.positive_words_.end());
    lex.negative_words_.erase(
        std::unique(lex.negative_words_.begin(), lex.negative_words_.end()),
        lex.negative_words_.end());
    lex.positive_set_.insert(lex.positive_words_.begin(), lex.positive_words_.end());
    lex.negative_set_.insert(lex.negative_words_.begin(), lex.negative_words_.end());
    return lex;
}

const Lexicon& Lexicon::builtin() {
    static const Lexicon instance = [] {
        std::vector<std::string> pos(std::begin(kPositiveWords), std::end(kPositiveWords));
        std::vector<std::string> neg(std::begin(kNegativeWords), std::end(kNegativeWords));
        return from_words(std::move(pos), std::move(neg));
    }();
    return instance;
}

Lexicon Lexicon::from_files(const std::string& positive_path, const std::string& negative_path) {
    return from_words(read_word_file(positive_path), read_word_file(negative_path));
}

int Lexicon::token_valence(const std::string& token) const {
    const std::string word = normalize_token(token);
    if (word.empty()) return 0;
    if (is_positive(word)) return 1;
    if (is_negative(word)) return -1;
    return 0;
}

}  // namespace dsipa
