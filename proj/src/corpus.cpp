#include "meronomy/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <unordered_set>

#include "meronomy/common.hpp"
#include "meronomy/kernels.hpp"
#include "meronomy/tagger.hpp"

namespace meronomy {

namespace {

bool is_word_byte(unsigned char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool has_alnum(std::string_view s)
{
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return is_word_byte(c); });
}

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

const std::set<std::string, std::less<>>& abbreviations()
{
    static const std::set<std::string, std::less<>> list = {
        "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e",
        "approx", "inc", "ltd", "co", "no", "fig", "est", "dept", "oz", "lbs", "ft",
    };
    return list;
}

// Word immediately before position `dot` (letters and inner periods), lowercased.
std::string word_before(std::string_view text, std::size_t dot)
{
    std::size_t b = dot;
    while (b > 0) {
        const char c = text[b - 1];
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '.')
            --b;
        else
            break;
    }
    return ascii_lower(text.substr(b, dot - b));
}

bool is_abbreviation_period(std::string_view text, std::size_t dot)
{
    const std::string w = word_before(text, dot);
    if (w.empty())
        return false;
    if (abbreviations().count(w) != 0)
        return true;
    // Single capital initial ("J. Smith").
    if (w.size() == 1 && dot >= 1 && text[dot - 1] >= 'A' && text[dot - 1] <= 'Z')
        return true;
    return false;
}

constexpr std::array<std::string_view, 6> kClitics = {"'s", "'re", "'ve", "'ll", "'d", "'m"};

void emit_word(std::string word, std::vector<std::string>& out)
{
    // Normalize typographic apostrophes.
    for (std::size_t p = word.find("\xE2\x80\x99"); p != std::string::npos; p = word.find("\xE2\x80\x99"))
        word.replace(p, 3, "'");
    word = ascii_lower(word);
    while (!word.empty() && word.front() == '\'')
        word.erase(word.begin());

    if (word.size() > 3 && word.ends_with("n't")) {
        out.push_back(word.substr(0, word.size() - 3));
        out.emplace_back("n't");
        return;
    }
    for (std::string_view clitic : kClitics) {
        if (word.size() > clitic.size() && word.ends_with(clitic)) {
            std::string stem = word.substr(0, word.size() - clitic.size());
            if (has_alnum(stem) && stem.find('\'') == std::string::npos) {
                out.push_back(std::move(stem));
                out.emplace_back(clitic);
                return;
            }
        }
    }
    while (!word.empty() && word.back() == '\'')
        word.pop_back();
    word.erase(std::remove(word.begin(), word.end(), '\''), word.end());
    if (has_alnum(word))
        out.push_back(std::move(word));
}

} // namespace

ReviewFieldMap ReviewFieldMap::amazon()
{
    return ReviewFieldMap{.id = "asin", .category = "category", .text = "reviewText"};
}

ReviewLoad load_reviews(const std::filesystem::path& path, const std::optional<std::string>& category_filter,
                        const ReviewFieldMap& fields)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open review file: " + path.string());

    ReviewLoad load;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            ++load.warnings;
            continue;
        }
        auto text_it = j.find(fields.text);
        if (text_it == j.end() || !text_it->is_string() || trim(text_it->get_ref<const std::string&>()).empty()) {
            ++load.warnings;
            continue;
        }
        RawReview review;
        review.text = text_it->get<std::string>();
        if (auto it = j.find(fields.category); it != j.end() && it->is_string())
            review.category = it->get<std::string>();
        if (category_filter && review.category != *category_filter)
            continue;
        if (auto it = j.find(fields.id); it != j.end() && (it->is_string() || it->is_number_integer()))
            review.id = it->is_string() ? it->get<std::string>() : std::to_string(it->get<long long>());
        else
            review.id = "line" + std::to_string(line_no);
        if (!seen.insert(review.id).second) {
            // Amazon dumps reuse the product id across reviews; disambiguate by line.
            if (fields.id != "id") {
                review.id += "@" + std::to_string(line_no);
                seen.insert(review.id);
            } else {
                ++load.warnings;
                continue;
            }
        }
        load.reviews.push_back(std::move(review));
    }
    return load;
}

std::vector<std::string> split_sentences(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto flush = [&](std::size_t end) {
        std::string_view s = trim(text.substr(start, end - start));
        if (!s.empty())
            out.emplace_back(s);
        start = end;
    };
    while (i < n) {
        const char c = text[i];
        if (c == '\n' && i + 1 < n && text[i + 1] == '\n') {
            flush(i);
            i += 2;
            continue;
        }
        if (c != '.' && c != '!' && c != '?') {
            ++i;
            continue;
        }
        if (c == '.') {
            // Decimal numbers and abbreviations do not end a sentence.
            if (i > 0 && i + 1 < n && is_digit(text[i - 1]) && is_digit(text[i + 1])) {
                ++i;
                continue;
            }
            if (is_abbreviation_period(text, i)) {
                ++i;
                continue;
            }
        }
        std::size_t end = i;
        while (end < n && (text[end] == '.' || text[end] == '!' || text[end] == '?'))
            ++end;
        while (end < n && (text[end] == '"' || text[end] == '\'' || text[end] == ')'))
            ++end;
        if (end < n && is_word_byte(static_cast<unsigned char>(text[end]))) {
            // "e.g.x" or "file.txt": no whitespace after the punctuation.
            i = end;
            continue;
        }
        flush(end);
        i = end;
    }
    flush(n);
    return out;
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> out;
    std::string word;
    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        const bool curly_apostrophe = c == 0xE2 && i + 2 < n && static_cast<unsigned char>(text[i + 1]) == 0x80 &&
                                      static_cast<unsigned char>(text[i + 2]) == 0x99;
        if (curly_apostrophe) {
            word += "'";
            i += 2;
            continue;
        }
        if (is_word_byte(c) || c == '\'') {
            word.push_back(static_cast<char>(c));
            continue;
        }
        const bool joins_inside = !word.empty() && i + 1 < n &&
                                  is_word_byte(static_cast<unsigned char>(text[i + 1])) &&
                                  ((c == '-' && word.back() != '\'') ||
                                   ((c == '.' || c == ',') && is_digit(word.back()) && is_digit(text[i + 1])));
        if (joins_inside) {
            word.push_back(static_cast<char>(c));
            continue;
        }
        if (!word.empty()) {
            emit_word(std::move(word), out);
            word.clear();
        }
    }
    if (!word.empty())
        emit_word(std::move(word), out);
    return out;
}

std::vector<ReviewSentence> split_and_tokenize(const RawReview& review)
{
    std::vector<ReviewSentence> out;
    std::size_t ordinal = 0;
    for (auto& raw : split_sentences(review.text)) {
        auto tokens = tokenize(raw);
        if (tokens.empty())
            continue;
        out.push_back(ReviewSentence{review.id + "#" + std::to_string(ordinal++), std::move(tokens), std::move(raw)});
    }
    return out;
}

std::vector<std::string> expand_phrases(std::span<const std::string> tokens)
{
    std::vector<std::string> out;
    for (const auto& t : tokens) {
        std::size_t b = 0;
        for (std::size_t p = t.find('_'); p != std::string::npos; p = t.find('_', b)) {
            out.push_back(t.substr(b, p - b));
            b = p + 1;
        }
        out.push_back(t.substr(b));
    }
    return out;
}

std::uint64_t PhraseLayer::unigram(std::string_view token) const
{
    auto it = unigram_counts.find(std::string(token));
    return it == unigram_counts.end() ? 0 : it->second;
}

std::uint64_t PhraseLayer::pair(std::string_view a, std::string_view b) const
{
    std::string key;
    key.reserve(a.size() + b.size() + 1);
    key.append(a).push_back(' ');
    key.append(b);
    auto it = pair_counts.find(key);
    return it == pair_counts.end() ? 0 : it->second;
}

double PhraseModel::score(std::size_t layer, std::string_view a, std::string_view b) const
{
    const PhraseLayer& l = layers.at(layer);
    const auto ca = l.unigram(a);
    const auto cb = l.unigram(b);
    if (ca == 0 || cb == 0)
        return -1.0;
    const double pair = static_cast<double>(l.pair(a, b));
    return (pair - static_cast<double>(options.min_count)) * static_cast<double>(l.total_tokens) /
           (static_cast<double>(ca) * static_cast<double>(cb));
}

bool PhraseModel::joins(std::size_t layer, std::string_view a, std::string_view b) const
{
    if (options.block_function_words && (is_function_word(a) || is_function_word(b)))
        return false;
    if (a == kMaskToken || b == kMaskToken)
        return false;
    return score(layer, a, b) >= options.threshold;
}

namespace {

std::vector<std::string> join_pass(const PhraseModel& model, std::size_t layer, const std::vector<std::string>& tokens)
{
    std::vector<std::string> out;
    out.reserve(tokens.size());
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (i + 1 < tokens.size() && model.joins(layer, tokens[i], tokens[i + 1])) {
            out.push_back(tokens[i] + "_" + tokens[i + 1]);
            i += 2;
        } else {
            out.push_back(tokens[i]);
            ++i;
        }
    }
    return out;
}

} // namespace

PhraseModel learn_phrases(std::span<const ReviewSentence> sentences, const PhraseOptions& options)
{
    if (sentences.empty())
        throw DataError("cannot learn phrases from an empty corpus");
    if (options.passes < 1 || options.passes > 2)
        throw UsageError("phrase passes must be 1 or 2");
    if (!(options.threshold > 0.0))
        throw UsageError("phrase threshold must be positive");

    PhraseModel model;
    model.options = options;
    std::vector<ReviewSentence> current(sentences.begin(), sentences.end());
    for (int pass = 0; pass < options.passes; ++pass) {
        auto counts = kernels::count_ngrams(current, kernels::Backend::openmp);
        PhraseLayer layer;
        layer.unigram_counts = std::move(counts.unigrams);
        layer.pair_counts = std::move(counts.pairs);
        layer.total_tokens = counts.total;
        model.layers.push_back(std::move(layer));
        if (pass + 1 < options.passes) {
            for (auto& s : current)
                s.tokens = join_pass(model, model.layers.size() - 1, s.tokens);
        }
    }
    return model;
}

ReviewSentence apply_phrases(const PhraseModel& model, const ReviewSentence& sentence)
{
    ReviewSentence out = sentence;
    for (std::size_t layer = 0; layer < model.layers.size(); ++layer)
        out.tokens = join_pass(model, layer, out.tokens);
    return out;
}

nlohmann::json PhraseModel::to_json() const
{
    // Pairs seen at most min_count times score <= 0 and can never pass a
    // positive threshold, so the serialized form drops them.
    nlohmann::json layers_json = nlohmann::json::array();
    for (const auto& l : layers) {
        std::map<std::string, std::uint64_t> pairs;
        std::map<std::string, std::uint64_t> unigrams;
        for (const auto& [key, count] : l.pair_counts) {
            if (count <= options.min_count)
                continue;
            pairs.emplace(key, count);
            const auto sp = key.find(' ');
            for (auto tok : {key.substr(0, sp), key.substr(sp + 1)})
                unigrams.emplace(tok, l.unigram(tok));
        }
        layers_json.push_back({{"total_tokens", l.total_tokens}, {"unigrams", unigrams}, {"pairs", pairs}});
    }
    return {
        {"format", "meronomy.phrases"},
        {"version", 1},
        {"passes", options.passes},
        {"min_count", options.min_count},
        {"threshold", options.threshold},
        {"block_function_words", options.block_function_words},
        {"layers", layers_json},
    };
}

PhraseModel PhraseModel::from_json(const nlohmann::json& j)
{
    if (j.value("format", "") != "meronomy.phrases" || j.value("version", 0) != 1)
        throw DataError("not a version-1 phrase model");
    PhraseModel m;
    m.options.passes = j.at("passes").get<int>();
    m.options.min_count = j.at("min_count").get<std::uint64_t>();
    m.options.threshold = j.at("threshold").get<double>();
    m.options.block_function_words = j.value("block_function_words", true);
    for (const auto& lj : j.at("layers")) {
        PhraseLayer l;
        l.total_tokens = lj.at("total_tokens").get<std::uint64_t>();
        for (const auto& [k, v] : lj.at("unigrams").items())
            l.unigram_counts.emplace(k, v.get<std::uint64_t>());
        for (const auto& [k, v] : lj.at("pairs").items())
            l.pair_counts.emplace(k, v.get<std::uint64_t>());
        m.layers.push_back(std::move(l));
    }
    return m;
}

nlohmann::json sentence_to_json(const ReviewSentence& s)
{
    return {{"sentence_id", s.sentence_id}, {"tokens", s.tokens}, {"raw", s.raw}};
}

ReviewSentence sentence_from_json(const nlohmann::json& j)
{
    ReviewSentence s;
    s.sentence_id = j.at("sentence_id").get<std::string>();
    s.tokens = j.at("tokens").get<std::vector<std::string>>();
    s.raw = j.value("raw", "");
    return s;
}

std::unordered_map<std::string, std::uint64_t> token_counts(std::span<const ReviewSentence> sentences)
{
    return kernels::count_ngrams(sentences, kernels::Backend::openmp).unigrams;
}

} // namespace meronomy
