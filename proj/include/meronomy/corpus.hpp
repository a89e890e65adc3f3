#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace meronomy {

struct RawReview {
    std::string id;
    std::string category;
    std::string text;
};

/// One sentence of a review. Tokens are lowercase; detected phrases are
/// joined with '_' ("operating_system").
struct ReviewSentence {
    std::string sentence_id;
    std::vector<std::string> tokens;
    std::string raw;

    bool operator==(const ReviewSentence&) const = default;
};

/// Field names used to pull a RawReview out of one JSON line. The defaults
/// match the native {id, category, text} layout.
struct ReviewFieldMap {
    std::string id = "id";
    std::string category = "category";
    std::string text = "text";

    /// Amazon review dumps: body in "reviewText", product id in "asin".
    static ReviewFieldMap amazon();
};

struct ReviewLoad {
    std::vector<RawReview> reviews;
    std::size_t warnings = 0;
};

/// Reads a JSON-lines review file. Malformed lines, lines without a usable
/// text field and duplicate ids are skipped and counted as warnings.
/// Throws DataError if the file cannot be opened.
ReviewLoad load_reviews(const std::filesystem::path& path,
                        const std::optional<std::string>& category_filter = std::nullopt,
                        const ReviewFieldMap& fields = {});

/// Rule-based splitter: breaks after runs of '.', '!' or '?' unless the
/// period belongs to a number or a known abbreviation.
std::vector<std::string> split_sentences(std::string_view text);

/// Lowercased word tokens. Clitics ('s, n't, 're, ...) become their own
/// tokens, punctuation-only tokens are dropped.
std::vector<std::string> tokenize(std::string_view text);

std::vector<ReviewSentence> split_and_tokenize(const RawReview& review);

/// Replaces each token's '_' with ' ' and re-splits; the inverse of phrase joining.
std::vector<std::string> expand_phrases(std::span<const std::string> tokens);

/// Adjacent-pair statistics for one phrase-detection pass.
struct PhraseLayer {
    std::unordered_map<std::string, std::uint64_t> unigram_counts;
    /// Keyed by "a b" (tokens never contain spaces).
    std::unordered_map<std::string, std::uint64_t> pair_counts;
    std::uint64_t total_tokens = 0;

    std::uint64_t unigram(std::string_view token) const;
    std::uint64_t pair(std::string_view a, std::string_view b) const;
};

struct PhraseOptions {
    int passes = 2;
    std::uint64_t min_count = 5;
    double threshold = 10.0;
    /// Pairs that start or end with a function word never join.
    bool block_function_words = true;
};

/// Collocation model. Each pass adds one layer; a pair joined in pass 1 is a
/// single token in pass 2, which is how trigrams arise.
struct PhraseModel {
    PhraseOptions options;
    std::vector<PhraseLayer> layers;

    /// (count(a,b) - min_count) * total_tokens / (count(a) * count(b)), or a
    /// negative value when either unigram is unseen.
    double score(std::size_t layer, std::string_view a, std::string_view b) const;
    bool joins(std::size_t layer, std::string_view a, std::string_view b) const;

    nlohmann::json to_json() const;
    static PhraseModel from_json(const nlohmann::json& j);
};

PhraseModel learn_phrases(std::span<const ReviewSentence> sentences, const PhraseOptions& options = {});

/// Greedy left-to-right joining, one pass per model layer.
ReviewSentence apply_phrases(const PhraseModel& model, const ReviewSentence& sentence);

nlohmann::json sentence_to_json(const ReviewSentence& s);
ReviewSentence sentence_from_json(const nlohmann::json& j);

/// Total occurrences of each token across the corpus.
std::unordered_map<std::string, std::uint64_t> token_counts(std::span<const ReviewSentence> sentences);

} // namespace meronomy
