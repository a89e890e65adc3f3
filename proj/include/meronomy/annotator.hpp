#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "meronomy/corpus.hpp"

namespace meronomy {

/// Seed (or planted) ontology for one or more products. Terms are stored in
/// token form: lowercase, spaces joined with '_'.
class SeedOntology {
public:
    struct Node {
        std::size_t product = 0;
        std::optional<std::size_t> parent;
        std::size_t depth = 0;
        std::vector<std::string> terms;
    };

    /// Accepts one {product, root} object or an array of them. Throws
    /// DataError on duplicate terms within a product or depth > max_depth.
    static SeedOntology from_json(const nlohmann::json& j, std::size_t max_depth = 5);
    static SeedOntology load(const std::filesystem::path& path, std::size_t max_depth = 5);

    std::size_t product_count() const { return products_.size(); }
    const std::string& product_name(std::size_t p) const { return products_.at(p); }
    std::span<const Node> nodes() const { return nodes_; }

    bool contains(std::string_view term) const;
    /// Node holding `term`, preferring `product` when given.
    std::optional<std::size_t> node_of(std::string_view term, std::optional<std::size_t> product = {}) const;

    /// True iff a1's node is a strict descendant of a2's node. Throws
    /// DataError naming the term when either is absent.
    bool is_descendant(std::string_view a1, std::string_view a2) const;
    bool node_is_descendant(std::size_t node, std::size_t ancestor) const;

    /// 2 for a product (root) term, 1 for any other ontology term, 0 otherwise.
    int aspect_label(std::string_view term) const;

    /// 1 if a2 is a feature of a1, 2 if a1 is a feature of a2, else 0. Terms
    /// outside the ontology, or from different products, are unrelated.
    int relation_label(std::string_view a1, std::string_view a2) const;

    nlohmann::json to_json() const;

private:
    std::vector<std::string> products_;
    std::vector<Node> nodes_;
    std::unordered_map<std::string, std::vector<std::size_t>> term_nodes_;
};

enum class Task { aspect, relation };

const char* task_name(Task t);
Task task_from_name(std::string_view name);

/// A masked sentence for one of the two classifiers. Aspect examples carry one
/// mask and one entity; relation examples carry two masks and the two aspects
/// in textual order. `label` is empty for unlabeled scoring inputs.
struct LabeledExample {
    std::string sentence_id;
    Task task = Task::aspect;
    std::vector<std::string> tokens;
    std::vector<std::size_t> mask_positions;
    std::vector<std::string> entities;
    std::optional<int> label;

    /// Throws DataError if the mask/entity counts do not fit the task.
    void validate() const;
    bool operator==(const LabeledExample&) const = default;
};

nlohmann::json example_to_json(const LabeledExample& e);
LabeledExample example_from_json(const nlohmann::json& j);

/// Sentences containing exactly one occurrence of a frequent entity, with that
/// token masked. Labels are left empty.
std::vector<LabeledExample> select_aspect_inputs(std::span<const ReviewSentence> sentences,
                                                 const std::unordered_set<std::string>& frequent_entities);

/// Sentences with exactly two mentions from two distinct groups, both masked.
/// `group_of` maps a term to its synset or node.
std::vector<LabeledExample> select_relation_inputs(std::span<const ReviewSentence> sentences,
                                                   const std::unordered_map<std::string, std::size_t>& group_of);

std::vector<LabeledExample> generate_aspect_examples(std::span<const ReviewSentence> sentences,
                                                     const SeedOntology& seed,
                                                     std::span<const std::string> frequent_entities);

std::vector<LabeledExample> generate_relation_examples(std::span<const ReviewSentence> sentences,
                                                       const SeedOntology& seed);

/// Uniform undersampling to the minority label count. Kept examples retain
/// their input order. Throws DataError if any of the labels 0, 1, 2 is absent.
std::vector<LabeledExample> balance_classes(std::span<const LabeledExample> examples, std::uint64_t seed);

std::array<std::size_t, 3> label_histogram(std::span<const LabeledExample> examples);

} // namespace meronomy
