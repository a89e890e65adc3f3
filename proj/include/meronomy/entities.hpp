#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "meronomy/corpus.hpp"
#include "meronomy/kernels.hpp"
#include "meronomy/tagger.hpp"

namespace meronomy {

struct EntityCount {
    std::string entity;
    std::uint64_t count = 0;

    bool operator==(const EntityCount&) const = default;
};

/// Noun tokens of one sentence. A tagger failure yields an empty set and
/// increments `*warnings` when given.
std::set<std::string> tag_nouns(const ReviewSentence& sentence, const PosTagger& tagger,
                                std::size_t* warnings = nullptr);

/// The n most frequent noun entities, by descending occurrence count with
/// lexicographic tie-break.
std::vector<EntityCount> top_entities(std::span<const ReviewSentence> sentences, const PosTagger& tagger,
                                      std::size_t n = 200, kernels::Backend backend = kernels::Backend::openmp,
                                      std::size_t* warnings = nullptr);

nlohmann::json entities_to_json(std::span<const EntityCount> entities);
std::vector<EntityCount> entities_from_json(const nlohmann::json& j);

} // namespace meronomy
