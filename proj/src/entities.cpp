#include "meronomy/entities.hpp"

#include <algorithm>

#include "meronomy/common.hpp"

namespace meronomy {

std::set<std::string> tag_nouns(const ReviewSentence& sentence, const PosTagger& tagger, std::size_t* warnings)
{
    std::set<std::string> nouns;
    std::vector<bool> mask;
    try {
        mask = tagger.noun_mask(sentence);
    } catch (const TaggerError&) {
        if (warnings)
            ++*warnings;
        return nouns;
    }
    for (std::size_t i = 0; i < sentence.tokens.size() && i < mask.size(); ++i) {
        if (mask[i])
            nouns.insert(sentence.tokens[i]);
    }
    return nouns;
}

std::vector<EntityCount> top_entities(std::span<const ReviewSentence> sentences, const PosTagger& tagger,
                                      std::size_t n, kernels::Backend backend, std::size_t* warnings)
{
    if (n == 0)
        throw UsageError("top_entities needs n >= 1");
    auto counted = kernels::count_nouns(sentences, tagger, backend);
    if (warnings)
        *warnings += counted.tagger_failures;

    std::vector<EntityCount> all;
    all.reserve(counted.counts.size());
    for (auto& [entity, count] : counted.counts)
        all.push_back(EntityCount{entity, count});
    const auto by_rank = [](const EntityCount& a, const EntityCount& b) {
        return a.count != b.count ? a.count > b.count : a.entity < b.entity;
    };
    const std::size_t keep = std::min(n, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), by_rank);
    all.resize(keep);
    return all;
}

nlohmann::json entities_to_json(std::span<const EntityCount> entities)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entities)
        arr.push_back({{"entity", e.entity}, {"count", e.count}});
    return arr;
}

std::vector<EntityCount> entities_from_json(const nlohmann::json& j)
{
    std::vector<EntityCount> out;
    for (const auto& e : j)
        out.push_back(EntityCount{e.at("entity").get<std::string>(), e.at("count").get<std::uint64_t>()});
    return out;
}

} // namespace meronomy
