#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "meronomy/annotator.hpp"
#include "meronomy/kernels.hpp"
#include "meronomy/scorer.hpp"
#include "meronomy/synsets.hpp"

namespace meronomy {

/// Accumulated relation votes between N synsets.
struct VoteMatrix {
    std::size_t n = 0;
    std::vector<double> v;            // v[i*n+j]: mass for "s_i is a feature of s_j"
    std::vector<std::uint64_t> pairs; // n_{i,j}, symmetric
    std::vector<std::uint64_t> c;     // occurrences of each synset's terms

    double vote(std::size_t i, std::size_t j) const { return v[i * n + j]; }
    std::uint64_t pair_count(std::size_t i, std::size_t j) const { return pairs[i * n + j]; }
};

/// A vote (p0,p1,p2) on (s_i, s_j) adds p1 to v_{j,i} and p2 to v_{i,j}.
/// Throws DataError if c does not have one entry per synset.
VoteMatrix accumulate_votes(std::span<const kernels::PairVote> votes, std::span<const std::uint64_t> c,
                            kernels::Backend backend = kernels::Backend::openmp);

/// Maps relation records onto synset pairs. Records whose two terms share a
/// synset are dropped; a term without a synset is a DataError.
std::vector<kernels::PairVote> pair_votes(std::span<const ScoreRecord> records,
                                          const std::unordered_map<std::string, std::size_t>& synset_of);

struct RelationMatrix {
    std::size_t n = 0;
    std::vector<double> r;

    double at(std::size_t i, std::size_t j) const { return r[i * n + j]; }
};

/// r_{i,j} = v_{i,j} / (c_i + c_j). Throws DataError if some c_i is 0.
RelationMatrix relation_matrix(const VoteMatrix& vm);

/// argmax_j r_{i,j} over j != i. Ties go to the product synset, then the
/// smallest id; a row without a positive entry yields the product synset.
std::size_t super_synset(const RelationMatrix& R, std::size_t i, std::size_t product);

struct OntologyTree {
    std::size_t root = 0;
    std::vector<std::optional<std::size_t>> parent;

    std::vector<std::size_t> children(std::size_t node) const;
    /// True iff `node` lies strictly below `ancestor`.
    bool is_descendant(std::size_t node, std::size_t ancestor) const;
    /// Exactly one parentless node (the root), no cycles, every node reaches the root.
    bool is_valid_tree() const;
};

/// Feature synsets are visited by descending R[s][super(s)] (ties: super is
/// the product first, then smaller id). Each attaches under its super synset
/// unless that synset already hangs below it, in which case it attaches to
/// the root.
OntologyTree build_tree(const RelationMatrix& R, std::size_t product);

struct OntologyNode {
    std::size_t id = 0;
    std::vector<std::string> terms;
    std::optional<std::size_t> parent;
    std::vector<std::pair<std::string, std::uint64_t>> prominence; // term → count, by descending count
    std::string display_term;

    bool operator==(const OntologyNode&) const = default;
};

struct Ontology {
    std::string product;
    std::string config_hash;
    std::vector<OntologyNode> nodes;

    std::size_t root() const;
    /// (parent display term, child display term) for every edge, in node order.
    std::vector<std::pair<std::string, std::string>> relations() const;

    nlohmann::json to_json() const;
    static Ontology from_json(const nlohmann::json& j);
};

Ontology assemble_ontology(std::string product, std::span<const Synset> synsets, const OntologyTree& tree,
                           const std::unordered_map<std::string, std::uint64_t>& counts,
                           std::string config_hash = {});

/// Differences between an ontology and one product of a reference tree, as
/// readable lines; empty when synset partition and parent function agree.
std::vector<std::string> compare_to_reference(const Ontology& ontology, const SeedOntology& reference,
                                              std::size_t product = 0);

nlohmann::json relation_matrix_to_json(const VoteMatrix& vm, const RelationMatrix& R);

} // namespace meronomy
