#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "meronomy/corpus.hpp"

namespace meronomy {

/// One node of the planted television meronomy.
struct PlantedSynset {
    std::vector<std::string> terms; // token form; "power_cord" is written as "power cord"
    int parent = -1;                // index into the synset list, -1 for the root
    std::vector<std::string> cues;  // adjectives used only around this synset
};

/// The fixed 3-level ontology behind the generator: a product root, four
/// parts and seven sub-parts, every synset holding two terms.
const std::vector<PlantedSynset>& planted_ontology();

struct SyntheticOptions {
    std::size_t sentences = 6000;
    std::uint64_t seed = 42;
    std::size_t qa_instances = 200;
};

struct SyntheticCorpus {
    std::vector<RawReview> reviews;
    std::size_t sentence_count = 0;
    nlohmann::json truth;        // full planted tree
    nlohmann::json seed;         // root and first level only
    nlohmann::json::array_t qa;  // {question, answer, category}
};

/// Reviews built from templates. Single-term sentences use one shared template
/// pool with synset-specific cue adjectives; two-term sentences pair a synset
/// with its parent or a sibling and keep the terms more than four tokens apart.
SyntheticCorpus generate_planted_corpus(const SyntheticOptions& options = {});

/// Writes reviews.jsonl, truth.json, seed.json and qa.jsonl into `dir`.
void write_planted_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

} // namespace meronomy
