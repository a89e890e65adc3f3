#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "meronomy/scorer.hpp"

namespace meronomy {

struct AspectDecision {
    std::string entity;
    std::size_t n_votes = 0;
    double mean_pa = 0.0; // mean of p1 + p2
    double mean_p2 = 0.0;
    bool is_aspect = false;
    bool is_product = false;

    bool operator==(const AspectDecision&) const = default;
};

struct AspectThresholds {
    double aspect = 0.65;  // strict: mean_pa > aspect
    double product = 0.45; // strict: mean_p2 > product
    std::size_t min_votes = 3;
};

struct AspectAggregation {
    std::vector<AspectDecision> decisions; // by descending n_votes, then entity
    std::vector<std::string> warnings;     // one per excluded entity
};

/// Means are taken over sorted values, so the result does not depend on vote order.
AspectAggregation aggregate_aspect_votes(const std::map<std::string, std::vector<VoteTriple>>& votes,
                                         const AspectThresholds& thresholds = {});

/// Groups aspect-task records by entity. Relation records are ignored.
std::map<std::string, std::vector<VoteTriple>> group_aspect_votes(std::span<const ScoreRecord> records);

std::vector<std::string> feature_aspects(std::span<const AspectDecision> decisions);
std::vector<std::string> product_aspects(std::span<const AspectDecision> decisions);

nlohmann::json decisions_to_json(std::span<const AspectDecision> decisions);
std::vector<AspectDecision> decisions_from_json(const nlohmann::json& j);

} // namespace meronomy
