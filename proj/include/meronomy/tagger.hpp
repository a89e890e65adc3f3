#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace meronomy {

struct ReviewSentence;

/// Raised by a tagger that cannot tag a particular sentence.
class TaggerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class WordClass { noun, verb, adjective, adverb, determiner, function, number, other };

/// Part-of-speech tagging, reduced to the one question the pipeline asks:
/// which token positions are nouns. Implementations must be safe to share
/// read-only across threads.
class PosTagger {
public:
    virtual ~PosTagger() = default;

    /// One flag per token. Throws TaggerError when the sentence cannot be tagged.
    virtual std::vector<bool> noun_mask(const ReviewSentence& sentence) const = 0;
};

/// Dependency-free tagger: closed-class word lists, a verb/adjective/adverb
/// lexicon, suffix rules, and a left-context rule for noun/verb homographs.
/// Unknown words default to noun. Joined phrases are tagged by their head
/// (last) word.
class LexiconTagger final : public PosTagger {
public:
    std::vector<bool> noun_mask(const ReviewSentence& sentence) const override;

    /// Context-free class of a single word.
    static WordClass word_class(std::string_view word);
    /// Class of `word` given the class of the previous token.
    static WordClass word_class(std::string_view word, WordClass previous);
};

/// Adapter for an external tagger's output: JSONL lines
/// {"sentence_id": ..., "tags": ["token/TAG", ...]} with Penn Treebank tags.
class PretaggedTagger final : public PosTagger {
public:
    static PretaggedTagger load(const std::filesystem::path& path);
    void add(std::string sentence_id, std::vector<std::string> token_tags);

    std::vector<bool> noun_mask(const ReviewSentence& sentence) const override;

private:
    struct Tagged {
        std::vector<std::string> tokens;
        std::vector<std::string> tags;
    };
    std::unordered_map<std::string, Tagged> by_sentence_;
};

/// Function words: determiners, pronouns, prepositions, conjunctions,
/// auxiliaries, and a few degree adverbs.
bool is_function_word(std::string_view word);

std::unique_ptr<PosTagger> make_tagger(std::string_view spec);

} // namespace meronomy
