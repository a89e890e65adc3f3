#include "meronomy/tagger.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "meronomy/common.hpp"
#include "meronomy/corpus.hpp"

namespace meronomy {

namespace {

using WordSet = std::unordered_set<std::string_view>;

const WordSet& determiners()
{
    static const WordSet s = {
        "the", "a", "an", "this", "that", "these", "those", "my", "your", "his", "her", "its", "our",
        "their", "'s", "no", "every", "each", "some", "any", "another", "both", "either", "neither",
        "several", "many", "few", "much", "more", "most", "all", "one", "two", "three", "which", "whose",
    };
    return s;
}

const WordSet& other_function_words()
{
    static const WordSet s = {
        // pronouns
        "i", "me", "you", "he", "him", "she", "it", "we", "us", "they", "them", "myself", "yourself",
        "itself", "themselves", "mine", "yours", "ours", "theirs", "what", "who", "whom", "something",
        "anything", "nothing", "everything", "someone", "anyone", "everyone", "one's",
        // prepositions and particles
        "of", "in", "on", "at", "by", "for", "with", "about", "against", "between", "into", "through",
        "during", "before", "after", "above", "below", "to", "from", "up", "down", "out", "off", "over",
        "under", "around", "near", "without", "within", "across", "along", "behind", "beside", "besides",
        "inside", "outside", "onto", "per", "than", "like", "via", "since", "until", "upon", "toward",
        "towards", "among",
        // conjunctions and complementizers
        "and", "or", "but", "nor", "yet", "if", "because", "although", "though", "while", "whereas",
        "unless", "as", "when", "where", "why", "how", "whether", "then", "once",
        // auxiliaries and modals
        "is", "am", "are", "was", "were", "be", "been", "being", "have", "has", "had", "having", "do",
        "does", "did", "doing", "will", "would", "shall", "should", "can", "could", "may", "might",
        "must", "ca", "wo", "'re", "'ve", "'ll", "'d", "'m", "n't", "not",
        // degree and focus adverbs
        "very", "so", "really", "quite", "too", "just", "also", "rather", "pretty", "fairly", "somewhat",
        "extremely", "super", "even", "only", "still", "there", "here",
    };
    return s;
}

const WordSet& verbs()
{
    static const WordSet s = {
        "love", "like", "hate", "buy", "bought", "return", "need", "want", "get", "got", "gotten",
        "make", "made", "take", "took", "taken", "give", "gave", "given", "go", "went", "gone", "come",
        "came", "arrive", "wear", "wore", "worn", "recommend", "expect", "think", "thought", "seem",
        "say", "said", "find", "found", "know", "knew", "known", "see", "saw", "seen", "try", "keep",
        "kept", "purchase", "receive", "send", "sent", "replace", "stop", "start", "turn", "held",
        "last", "run", "ran", "cook", "bake", "clean", "wash", "open", "close", "plug", "connect",
        "install", "update", "crash", "freeze", "froze", "drain", "overheat", "stretch", "shrink",
        "shrank", "fade", "rip", "appreciate", "enjoy", "adore", "dislike", "regret", "exchange", "help",
        "notice", "prefer", "suggest", "wish", "hope", "guess", "believe", "mean", "meant", "put", "pay",
        "paid", "spend", "spent", "save", "waste", "read", "write", "wrote", "written", "call", "ask",
        "tell", "told", "show", "shown", "leave", "let", "begin", "began", "become", "became", "stay",
        "live", "sit", "sat", "hear", "heard", "listen", "move", "pick", "pull", "push", "carry", "fall",
        "fell", "hang", "hung", "protect", "include", "contain", "deliver", "pack", "unpack", "assemble",
        "adjust", "fix", "repair", "beat", "blend", "whip", "knead", "load", "lag", "die", "died",
        "break", "broke", "broken", "disappoint", "impress", "satisfy", "love", "own", "exceed", "match",
        "complain", "arrived", "wait", "waited", "happen", "feels", "fits", "allow", "lack", "hold",
        "bring", "brought", "sell", "sold", "choose", "chose", "decide", "seems", "sounds", "looks",
        "works", "loves", "likes", "bought", "gets", "makes", "keeps", "runs", "comes", "goes", "says",
    };
    return s;
}

// Words that are nouns after a determiner or adjective and verbs otherwise.
const WordSet& homographs()
{
    static const WordSet s = {
        "sound", "design", "look", "feel", "fit", "use", "charge", "work", "cost", "display", "control",
        "finish", "print", "fold", "zip", "price", "light", "stand", "set", "range", "drop", "color",
        "colour", "shape", "drive", "play", "stream", "face", "mount", "handle", "power", "switch",
        "cover", "return", "order", "view", "cut", "grip", "smell", "taste", "touch", "support",
        "scratch", "stain", "crack", "dent", "tear", "size", "picture", "value", "quality", "sign",
        "record", "review", "gift", "wear", "change", "input", "output", "process", "mix", "sleeve",
        "seat", "setup", "upgrade", "repair", "purchase",
    };
    return s;
}

const WordSet& adjectives()
{
    static const WordSet s = {
        "good", "great", "nice", "bad", "poor", "excellent", "amazing", "awesome", "perfect", "terrible",
        "horrible", "awful", "beautiful", "lovely", "cute", "gorgeous", "ugly", "soft", "hard", "warm",
        "cold", "hot", "cool", "big", "small", "large", "little", "tiny", "huge", "long", "short", "tall",
        "wide", "narrow", "thick", "thin", "heavy", "light", "strong", "weak", "cheap", "expensive",
        "new", "old", "easy", "difficult", "simple", "clear", "sharp", "bright", "dark", "dim", "vivid",
        "crisp", "rich", "deep", "loud", "quiet", "clean", "dirty", "smooth", "rough", "shiny", "dull",
        "glossy", "matte", "flat", "curved", "black", "white", "red", "blue", "green", "yellow", "grey",
        "gray", "pink", "purple", "brown", "orange", "silver", "gold", "golden", "fast", "slow", "quick",
        "responsive", "sluggish", "sturdy", "flimsy", "solid", "fragile", "durable", "reliable", "fine",
        "comfortable", "uncomfortable", "cozy", "itchy", "scratchy", "stretchy", "tight", "loose", "snug",
        "stiff", "firm", "sleek", "elegant", "stylish", "classy", "fancy", "plain", "modern", "classic",
        "vintage", "accurate", "precise", "steady", "stable", "wobbly", "noisy", "silent", "powerful",
        "efficient", "decent", "okay", "ok", "fantastic", "wonderful", "superb", "incredible", "solid",
        "reasonable", "affordable", "overpriced", "worth", "happy", "sad", "glad", "sorry", "pleased",
        "satisfied", "disappointed", "impressed", "real", "true", "fake", "genuine", "full", "empty",
        "high", "low", "tinny", "muffled", "booming", "punchy", "balanced", "harsh", "mellow", "warm",
        "natural", "accurate", "washed", "faded", "vibrant", "saturated", "dull", "grainy", "blurry",
        "detailed", "pixelated", "intuitive", "confusing", "clunky", "handy", "useful", "useless",
        "convenient", "portable", "compact", "bulky", "lightweight", "slim", "sleek", "chunky", "delicate",
        "dainty", "sparkly", "tarnished", "rusty", "scratched", "dented", "broken", "loose", "secure",
        "adjustable", "removable", "detachable", "wireless", "cordless", "waterproof", "entire", "whole",
        "main", "extra", "other", "same", "different", "own", "certain", "right", "wrong", "best",
        "better", "worse", "worst", "first", "last", "next", "previous", "only", "overall", "sure",
        "able", "unable", "free", "busy", "ready", "brilliant", "dead", "alive", "stunning", "striking",
        "subtle", "gentle", "crunchy", "chewy", "fresh", "stale", "sweet", "sour", "bitter", "salty",
        "spicy", "bland", "tasty", "creamy", "fluffy", "silky", "fuzzy", "woolly", "lightweight",
    };
    return s;
}

const WordSet& adverbs()
{
    static const WordSet s = {
        "well", "always", "never", "often", "sometimes", "again", "already", "almost", "enough",
        "maybe", "perhaps", "ever", "back", "away", "soon", "later", "now", "today", "yesterday",
        "instead", "anyway", "altogether", "else", "far", "together", "ahead", "overall", "indeed",
    };
    return s;
}

const WordSet& ly_nouns()
{
    static const WordSet s = {"family", "supply", "assembly", "jelly", "belly", "butterfly", "rally",
                              "ally", "reply", "fly", "anomaly", "poly", "lily", "holly"};
    return s;
}

bool is_number(std::string_view w)
{
    bool digit = false;
    for (char c : w) {
        if (c >= '0' && c <= '9')
            digit = true;
        else if (c != '.' && c != ',' && c != '-')
            return false;
    }
    return digit;
}

// Known verb through regular inflection: -s, -es, -ed, -ing, with optional silent e.
bool inflected_verb(std::string_view w, const WordSet& lexicon)
{
    auto known = [&](std::string_view stem) {
        if (stem.empty())
            return false;
        if (lexicon.count(stem))
            return true;
        std::string with_e(stem);
        with_e += 'e';
        if (lexicon.count(with_e))
            return true;
        // doubled consonant: "stopped" -> "stop"
        if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2])
            return lexicon.count(stem.substr(0, stem.size() - 1)) != 0;
        return false;
    };
    if (w.ends_with("ing") && w.size() > 4)
        return known(w.substr(0, w.size() - 3));
    if (w.ends_with("ed") && w.size() > 3)
        return known(w.substr(0, w.size() - 2)) || known(w.substr(0, w.size() - 1));
    if (w.ends_with("es") && w.size() > 3 && known(w.substr(0, w.size() - 2)))
        return true;
    if (w.ends_with("s") && w.size() > 2)
        return known(w.substr(0, w.size() - 1));
    return false;
}

std::string_view singular(std::string_view w)
{
    if (w.size() > 3 && w.ends_with("s") && !w.ends_with("ss"))
        return w.substr(0, w.size() - 1);
    return w;
}

bool nominal_context(WordClass previous)
{
    return previous == WordClass::determiner || previous == WordClass::adjective ||
           previous == WordClass::number;
}

std::string_view head_word(std::string_view token)
{
    const auto p = token.rfind('_');
    return p == std::string_view::npos ? token : token.substr(p + 1);
}

} // namespace

bool is_function_word(std::string_view word)
{
    return determiners().count(word) != 0 || other_function_words().count(word) != 0;
}

WordClass LexiconTagger::word_class(std::string_view word)
{
    if (word == kMaskToken)
        return WordClass::noun;
    if (determiners().count(word))
        return WordClass::determiner;
    if (other_function_words().count(word))
        return WordClass::function;
    if (is_number(word))
        return WordClass::number;
    if (homographs().count(word) || homographs().count(singular(word)))
        return WordClass::noun;
    if (adjectives().count(word))
        return WordClass::adjective;
    if (adverbs().count(word))
        return WordClass::adverb;
    if (verbs().count(word) || inflected_verb(word, verbs()))
        return WordClass::verb;
    if (word.size() > 4 && word.ends_with("ly") && !ly_nouns().count(word))
        return WordClass::adverb;
    if (word.size() > 4 && word.ends_with("ed") && !word.ends_with("eed"))
        return WordClass::verb;
    for (std::string_view suffix : {"ous", "ful", "able", "ible", "less"}) {
        if (word.size() > suffix.size() + 2 && word.ends_with(suffix))
            return WordClass::adjective;
    }
    if (word.size() > 5 && word.ends_with("ive"))
        return WordClass::adjective;
    return WordClass::noun;
}

WordClass LexiconTagger::word_class(std::string_view word, WordClass previous)
{
    const bool compound = word.find('_') != std::string_view::npos;
    const std::string_view head = head_word(word);
    const bool homograph = homographs().count(head) || homographs().count(singular(head));
    if (homograph) {
        // Joined phrases are nominal compounds ("hard_drive").
        if (compound || nominal_context(previous))
            return WordClass::noun;
        return WordClass::verb;
    }
    return word_class(head);
}

std::vector<bool> LexiconTagger::noun_mask(const ReviewSentence& sentence) const
{
    std::vector<bool> mask(sentence.tokens.size(), false);
    WordClass previous = WordClass::other;
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
        const WordClass c = word_class(sentence.tokens[i], previous);
        mask[i] = c == WordClass::noun && sentence.tokens[i] != kMaskToken;
        previous = c;
    }
    return mask;
}

PretaggedTagger PretaggedTagger::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open pre-tagged corpus: " + path.string());
    PretaggedTagger tagger;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("sentence_id") || !j.contains("tags"))
            throw DataError("pre-tagged corpus line " + std::to_string(line_no) + " is malformed");
        tagger.add(j.at("sentence_id").get<std::string>(), j.at("tags").get<std::vector<std::string>>());
    }
    return tagger;
}

void PretaggedTagger::add(std::string sentence_id, std::vector<std::string> token_tags)
{
    Tagged t;
    for (const auto& tt : token_tags) {
        const auto slash = tt.rfind('/');
        if (slash == std::string::npos || slash == 0)
            throw DataError("pre-tagged token without a tag: " + tt);
        t.tokens.push_back(ascii_lower(tt.substr(0, slash)));
        t.tags.push_back(tt.substr(slash + 1));
    }
    by_sentence_[std::move(sentence_id)] = std::move(t);
}

std::vector<bool> PretaggedTagger::noun_mask(const ReviewSentence& sentence) const
{
    auto it = by_sentence_.find(sentence.sentence_id);
    if (it == by_sentence_.end())
        throw TaggerError("no tags for sentence " + sentence.sentence_id);
    const Tagged& t = it->second;

    // Tags cover unphrased tokens; a joined token takes its head word's tag.
    std::vector<bool> mask;
    std::size_t k = 0;
    for (const auto& token : sentence.tokens) {
        const auto parts = expand_phrases(std::span<const std::string>(&token, 1));
        if (k + parts.size() > t.tokens.size())
            throw TaggerError("tag count mismatch for sentence " + sentence.sentence_id);
        for (std::size_t p = 0; p < parts.size(); ++p) {
            if (t.tokens[k + p] != parts[p])
                throw TaggerError("token mismatch in sentence " + sentence.sentence_id);
        }
        k += parts.size();
        mask.push_back(t.tags[k - 1].starts_with("NN"));
    }
    if (k != t.tokens.size())
        throw TaggerError("tag count mismatch for sentence " + sentence.sentence_id);
    return mask;
}

std::unique_ptr<PosTagger> make_tagger(std::string_view spec)
{
    if (spec.empty() || spec == "lexicon")
        return std::make_unique<LexiconTagger>();
    if (spec.starts_with("pretagged:"))
        return std::make_unique<PretaggedTagger>(PretaggedTagger::load(std::string(spec.substr(10))));
    throw UsageError("unknown tagger '" + std::string(spec) + "' (expected lexicon or pretagged:<path>)");
}

} // namespace meronomy
