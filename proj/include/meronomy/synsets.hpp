#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "meronomy/embedding.hpp"
#include "meronomy/kernels.hpp"

namespace meronomy {

/// Cosine similarities over a table's unit-normalized rows, with the
/// normalizer of rcs_n (sum of the n largest similarities to other words)
/// computed on demand and cached per row.
class SimilarityIndex {
public:
    /// Throws UsageError unless the vocabulary is larger than n.
    SimilarityIndex(const EmbeddingTable& table, std::size_t n = 10,
                    kernels::Backend backend = kernels::Backend::openmp);

    const EmbeddingTable& table() const { return *table_; }
    std::size_t n() const { return n_; }

    double cosine(std::size_t i, std::size_t j) const;
    /// Computes and caches the top-n sums of the given rows.
    void prepare(std::span<const std::size_t> rows);
    double top_sum(std::size_t i) const;

    /// rcs_n(w_i, w_j) = cos(w_i, w_j) / sum over TOP_{i,n} of cos(w_i, w_c).
    double rcs(std::size_t i, std::size_t j) const;
    double rcs(std::string_view wi, std::string_view wj) const;

private:
    const EmbeddingTable* table_;
    std::size_t n_;
    kernels::Backend backend_;
    std::vector<double> unit_;
    mutable std::unordered_map<std::size_t, double> top_sums_;
};

struct SynonymEdge {
    std::size_t a = 0; // a < b, indices into SynonymGraph::terms
    std::size_t b = 0;
    double weight = 0.0;
};

/// Undirected graph over feature-aspect terms.
struct SynonymGraph {
    std::vector<std::string> terms;
    std::vector<SynonymEdge> edges;
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;

    double weighted_degree(std::size_t node) const;
};

/// Edge (i, j) iff rcs_n(a_i, a_j) + rcs_n(a_j, a_i) >= edge_threshold.
/// Terms missing from the table raise DataError.
SynonymGraph build_synonym_graph(SimilarityIndex& index, std::span<const std::string> aspects,
                                 double edge_threshold = 0.21);

/// Partitions graph nodes into clusters of node indices.
class SynsetClusterer {
public:
    virtual ~SynsetClusterer() = default;
    virtual std::vector<std::vector<std::size_t>> cluster(const SynonymGraph& graph, std::size_t max_distance) const = 0;
    virtual std::string name() const = 0;
};

/// Nodes are ranked by weighted degree (ties by term). Each unassigned node,
/// in rank order, seeds a cluster that repeatedly absorbs the best-ranked
/// unassigned neighbour of a member, provided every pair of members stays
/// within max_distance hops inside the cluster.
class RankedDistanceClusterer final : public SynsetClusterer {
public:
    std::vector<std::vector<std::size_t>> cluster(const SynonymGraph& graph, std::size_t max_distance) const override;
    std::string name() const override { return "ranked-distance"; }
};

std::unique_ptr<SynsetClusterer> make_clusterer(std::string_view name);

struct Synset {
    std::size_t id = 0;
    std::vector<std::string> terms; // by descending count, then term
    bool is_product = false;
    std::uint64_t c = 0;            // corpus occurrences of all terms

    bool operator==(const Synset&) const = default;
};

/// Product synset (id 0) holds the product aspects verbatim; feature synsets
/// follow by descending c, ties by first term. Throws DataError if a synset
/// would have no occurrences.
std::vector<Synset> assemble_synsets(const SynonymGraph& graph, std::span<const std::vector<std::size_t>> clusters,
                                     std::span<const std::string> product_aspects,
                                     const std::unordered_map<std::string, std::uint64_t>& counts);

/// Term → synset id.
std::unordered_map<std::string, std::size_t> synset_index(std::span<const Synset> synsets);

nlohmann::json synsets_to_json(std::span<const Synset> synsets);
std::vector<Synset> synsets_from_json(const nlohmann::json& j);

} // namespace meronomy
