#include "meronomy/synsets.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

#include "meronomy/common.hpp"

namespace meronomy {

SimilarityIndex::SimilarityIndex(const EmbeddingTable& table, std::size_t n, kernels::Backend backend)
    : table_(&table), n_(n), backend_(backend), unit_(table.unit_rows())
{
    if (n == 0)
        throw UsageError("rcs neighbourhood size must be positive");
    if (table.size() <= n)
        throw UsageError("embedding vocabulary (" + std::to_string(table.size()) +
                         " words) must be larger than the rcs neighbourhood " + std::to_string(n));
}

double SimilarityIndex::cosine(std::size_t i, std::size_t j) const
{
    const std::size_t d = table_->dim();
    return kernels::dot(std::span<const double>(unit_).subspan(i * d, d),
                        std::span<const double>(unit_).subspan(j * d, d));
}

void SimilarityIndex::prepare(std::span<const std::size_t> rows)
{
    std::vector<std::size_t> missing;
    for (auto r : rows) {
        if (!top_sums_.count(r))
            missing.push_back(r);
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    if (missing.empty())
        return;
    kernels::UnitVectors vectors{unit_, table_->size(), table_->dim()};
    auto sums = kernels::top_similarity_sums(vectors, missing, n_, backend_);
    for (std::size_t k = 0; k < missing.size(); ++k)
        top_sums_[missing[k]] = sums[k];
}

double SimilarityIndex::top_sum(std::size_t i) const
{
    auto it = top_sums_.find(i);
    if (it != top_sums_.end())
        return it->second;
    const std::size_t row[] = {i};
    kernels::UnitVectors vectors{unit_, table_->size(), table_->dim()};
    const double s = kernels::top_similarity_sums(vectors, row, n_, kernels::Backend::serial).at(0);
    top_sums_[i] = s;
    return s;
}

double SimilarityIndex::rcs(std::size_t i, std::size_t j) const
{
    const double denom = top_sum(i);
    if (denom == 0.0)
        return 0.0;
    return cosine(i, j) / denom;
}

double SimilarityIndex::rcs(std::string_view wi, std::string_view wj) const
{
    return rcs(table_->index_of(wi), table_->index_of(wj));
}

double SynonymGraph::weighted_degree(std::size_t node) const
{
    // Summed in neighbour-term order so the value does not depend on edge order.
    std::vector<std::pair<std::string_view, double>> nb;
    for (const auto& [other, w] : adjacency.at(node))
        nb.emplace_back(terms[other], w);
    std::sort(nb.begin(), nb.end());
    double sum = 0.0;
    for (const auto& [term, w] : nb)
        sum += w;
    return sum;
}

SynonymGraph build_synonym_graph(SimilarityIndex& index, std::span<const std::string> aspects, double edge_threshold)
{
    SynonymGraph g;
    g.terms.assign(aspects.begin(), aspects.end());
    g.adjacency.resize(g.terms.size());
    std::vector<std::size_t> rows;
    rows.reserve(g.terms.size());
    for (const auto& t : g.terms)
        rows.push_back(index.table().index_of(t));
    index.prepare(rows);

    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
            const double w = index.rcs(rows[a], rows[b]) + index.rcs(rows[b], rows[a]);
            if (w >= edge_threshold) {
                g.edges.push_back({a, b, w});
                g.adjacency[a].emplace_back(b, w);
                g.adjacency[b].emplace_back(a, w);
            }
        }
    }
    return g;
}

namespace {

// True if `candidate` reaches every member within max_distance hops using
// only members and itself.
bool fits(const SynonymGraph& g, const std::vector<char>& in_cluster, std::size_t cluster_size, std::size_t candidate,
          std::size_t max_distance)
{
    std::vector<std::size_t> dist(g.terms.size(), SIZE_MAX);
    std::deque<std::size_t> queue{candidate};
    dist[candidate] = 0;
    std::size_t reached = 0;
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        if (dist[u] == max_distance)
            continue;
        for (const auto& [v, w] : g.adjacency[u]) {
            if (!in_cluster[v] || dist[v] != SIZE_MAX)
                continue;
            dist[v] = dist[u] + 1;
            ++reached;
            queue.push_back(v);
        }
    }
    return reached == cluster_size;
}

} // namespace

std::vector<std::vector<std::size_t>> RankedDistanceClusterer::cluster(const SynonymGraph& g,
                                                                       std::size_t max_distance) const
{
    const std::size_t n = g.terms.size();
    std::vector<double> degree(n);
    for (std::size_t i = 0; i < n; ++i)
        degree[i] = g.weighted_degree(i);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (degree[a] != degree[b])
            return degree[a] > degree[b];
        return g.terms[a] < g.terms[b];
    });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r)
        rank[order[r]] = r;

    std::vector<char> assigned(n, 0);
    std::vector<std::vector<std::size_t>> clusters;
    for (auto seed : order) {
        if (assigned[seed])
            continue;
        std::vector<char> in_cluster(n, 0);
        std::vector<std::size_t> members{seed};
        in_cluster[seed] = 1;
        assigned[seed] = 1;
        if (max_distance > 0) {
            std::vector<char> rejected(n, 0);
            for (;;) {
                std::size_t best = SIZE_MAX;
                for (auto m : members) {
                    for (const auto& [v, w] : g.adjacency[m]) {
                        if (assigned[v] || rejected[v])
                            continue;
                        if (best == SIZE_MAX || rank[v] < rank[best])
                            best = v;
                    }
                }
                if (best == SIZE_MAX)
                    break;
                if (fits(g, in_cluster, members.size(), best, max_distance)) {
                    in_cluster[best] = 1;
                    assigned[best] = 1;
                    members.push_back(best);
                    // A larger cluster can shorten paths, so earlier rejects get another chance.
                    std::fill(rejected.begin(), rejected.end(), 0);
                } else {
                    rejected[best] = 1;
                }
            }
        }
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
        clusters.push_back(std::move(members));
    }
    return clusters;
}

std::unique_ptr<SynsetClusterer> make_clusterer(std::string_view name)
{
    if (name == "ranked-distance")
        return std::make_unique<RankedDistanceClusterer>();
    throw UsageError("unknown clustering backend '" + std::string(name) + "'");
}

namespace {

std::string join_terms(const std::vector<std::string>& terms)
{
    std::string out;
    for (const auto& t : terms)
        out += (out.empty() ? "" : ", ") + t;
    return out;
}

Synset make_synset(std::vector<std::string> terms, bool is_product,
                   const std::unordered_map<std::string, std::uint64_t>& counts)
{
    auto count_of = [&](const std::string& t) {
        auto it = counts.find(t);
        return it == counts.end() ? std::uint64_t{0} : it->second;
    };
    std::sort(terms.begin(), terms.end(), [&](const std::string& a, const std::string& b) {
        const auto ca = count_of(a), cb = count_of(b);
        return ca != cb ? ca > cb : a < b;
    });
    Synset s;
    s.is_product = is_product;
    for (const auto& t : terms)
        s.c += count_of(t);
    s.terms = std::move(terms);
    if (s.c == 0)
        throw DataError("synset {" + join_terms(s.terms) + "} never occurs in the corpus");
    return s;
}

} // namespace

std::vector<Synset> assemble_synsets(const SynonymGraph& graph, std::span<const std::vector<std::size_t>> clusters,
                                     std::span<const std::string> product_aspects,
                                     const std::unordered_map<std::string, std::uint64_t>& counts)
{
    if (product_aspects.empty())
        throw DataError("no product aspects were accepted; the ontology has no root");
    std::vector<Synset> out;
    out.push_back(make_synset({product_aspects.begin(), product_aspects.end()}, true, counts));

    std::vector<Synset> features;
    std::vector<char> seen(graph.terms.size(), 0);
    for (const auto& cl : clusters) {
        std::vector<std::string> terms;
        for (auto i : cl) {
            if (seen.at(i)++)
                throw DataError("clustering assigned term '" + graph.terms[i] + "' twice");
            terms.push_back(graph.terms[i]);
        }
        if (!terms.empty())
            features.push_back(make_synset(std::move(terms), false, counts));
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i])
            throw DataError("clustering left term '" + graph.terms[i] + "' unassigned");
    }
    std::sort(features.begin(), features.end(), [](const Synset& a, const Synset& b) {
        return a.c != b.c ? a.c > b.c : a.terms.front() < b.terms.front();
    });
    for (auto& s : features)
        out.push_back(std::move(s));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].id = i;
    return out;
}

std::unordered_map<std::string, std::size_t> synset_index(std::span<const Synset> synsets)
{
    std::unordered_map<std::string, std::size_t> out;
    for (const auto& s : synsets) {
        for (const auto& t : s.terms) {
            if (!out.emplace(t, s.id).second)
                throw DataError("term '" + t + "' belongs to more than one synset");
        }
    }
    return out;
}

nlohmann::json synsets_to_json(std::span<const Synset> synsets)
{
    auto arr = nlohmann::json::array();
    for (const auto& s : synsets)
        arr.push_back({{"id", s.id}, {"terms", s.terms}, {"is_product", s.is_product}, {"c", s.c}});
    return arr;
}

std::vector<Synset> synsets_from_json(const nlohmann::json& j)
{
    std::vector<Synset> out;
    try {
        for (const auto& e : j) {
            Synset s;
            s.id = e.at("id").get<std::size_t>();
            s.terms = e.at("terms").get<std::vector<std::string>>();
            s.is_product = e.at("is_product").get<bool>();
            s.c = e.at("c").get<std::uint64_t>();
            if (s.id != out.size())
                throw DataError("synset ids must be consecutive from 0");
            if (s.terms.empty())
                throw DataError("synset " + std::to_string(s.id) + " has no terms");
            out.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed synsets: ") + e.what());
    }
    if (out.empty() || !out.front().is_product)
        throw DataError("synset 0 must be the product synset");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].is_product)
            throw DataError("only synset 0 may be the product synset");
    }
    return out;
}

} // namespace meronomy
