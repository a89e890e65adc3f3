#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "meronomy/common.hpp"
#include "meronomy/synsets.hpp"

using namespace meronomy;
using Clusters = std::vector<std::vector<std::size_t>>;

namespace {

EmbeddingTable fixed_table(std::size_t terms, std::size_t dim, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    std::vector<std::string> vocab;
    std::vector<float> data;
    for (std::size_t i = 0; i < terms; ++i) {
        vocab.push_back("w" + std::to_string(i));
        for (std::size_t k = 0; k < dim; ++k)
            data.push_back(u(rng));
    }
    return EmbeddingTable(vocab, data, dim);
}

double brute_cos(const EmbeddingTable& t, std::size_t i, std::size_t j)
{
    auto a = t.vector(i);
    auto b = t.vector(j);
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ab += double(a[k]) * b[k];
        aa += double(a[k]) * a[k];
        bb += double(b[k]) * b[k];
    }
    return ab / std::sqrt(aa * bb);
}

double brute_rcs(const EmbeddingTable& t, std::size_t i, std::size_t j, std::size_t n)
{
    std::vector<double> sims;
    for (std::size_t c = 0; c < t.size(); ++c) {
        if (c != i)
            sims.push_back(brute_cos(t, i, c));
    }
    std::sort(sims.rbegin(), sims.rend());
    double denom = 0;
    for (std::size_t k = 0; k < n; ++k)
        denom += sims[k];
    return brute_cos(t, i, j) / denom;
}

SynonymGraph graph_of(std::vector<std::string> terms, const std::vector<SynonymEdge>& edges)
{
    SynonymGraph g;
    g.terms = std::move(terms);
    g.edges = edges;
    g.adjacency.resize(g.terms.size());
    for (const auto& e : edges) {
        g.adjacency[e.a].push_back({e.b, e.weight});
        g.adjacency[e.b].push_back({e.a, e.weight});
    }
    return g;
}

bool together(const Clusters& clusters, std::size_t a, std::size_t b)
{
    for (const auto& c : clusters) {
        const bool ha = std::find(c.begin(), c.end(), a) != c.end();
        const bool hb = std::find(c.begin(), c.end(), b) != c.end();
        if (ha || hb)
            return ha && hb;
    }
    return false;
}

} // namespace

TEST_CASE("rcs matches brute force on a fixed 20-term table")
{
    // Shift every vector toward a common direction so all cosines are positive
    // and the normalizer is well away from zero.
    auto raw = fixed_table(20, 12, 21);
    std::vector<float> data(raw.data().begin(), raw.data().end());
    for (std::size_t i = 0; i < 20; ++i)
        data[i * 12] += 3.0f;
    EmbeddingTable table(std::vector<std::string>(raw.vocab().begin(), raw.vocab().end()), data, 12);

    for (auto backend : {kernels::Backend::serial, kernels::Backend::openmp}) {
        SimilarityIndex index(table, 10, backend);
        for (std::size_t i = 0; i < 20; ++i) {
            double unit_sum = 0.0;
            std::vector<std::pair<double, std::size_t>> ranked;
            for (std::size_t j = 0; j < 20; ++j) {
                if (j == i)
                    continue;
                CHECK(std::abs(index.rcs(i, j) - brute_rcs(table, i, j, 10)) < 1e-9);
                ranked.push_back({brute_cos(table, i, j), j});
            }
            std::sort(ranked.rbegin(), ranked.rend());
            for (std::size_t k = 0; k < 10; ++k)
                unit_sum += index.rcs(i, ranked[k].second);
            CHECK(std::abs(unit_sum - 1.0) < 1e-9);
        }
    }
    SimilarityIndex index(table, 10);
    CHECK(index.rcs("w3", "w7") == doctest::Approx(brute_rcs(table, 3, 7, 10)).epsilon(1e-12));
    CHECK_THROWS_AS(SimilarityIndex(fixed_table(10, 4, 1), 10), UsageError);
}

TEST_CASE("edges use the symmetric sum against the threshold")
{
    // Four orthogonal-ish directions; w0/w1 nearly parallel.
    std::vector<std::string> vocab;
    std::vector<float> data;
    const std::size_t dim = 16;
    std::mt19937_64 rng(2);
    std::normal_distribution<float> g(0.0f, 0.05f);
    for (std::size_t i = 0; i < 14; ++i) {
        vocab.push_back("w" + std::to_string(i));
        for (std::size_t k = 0; k < dim; ++k)
            data.push_back((k == (i == 1 ? 0 : i) ? 1.0f : 0.0f) + g(rng));
    }
    EmbeddingTable table(vocab, data, dim);
    SimilarityIndex index(table, 10);
    std::vector<std::string> aspects{"w0", "w1", "w2", "w3"};
    auto graph = build_synonym_graph(index, aspects, 0.21);
    REQUIRE(graph.terms == aspects);
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a + 1; b < 4; ++b) {
            const double w = index.rcs(aspects[a], aspects[b]) + index.rcs(aspects[b], aspects[a]);
            const bool has = std::any_of(graph.edges.begin(), graph.edges.end(),
                                         [&](const SynonymEdge& e) { return e.a == a && e.b == b; });
            CHECK(has == (w >= 0.21));
        }
    }
    CHECK(graph.edges.size() >= 1);
    std::vector<std::string> unknown{"w0", "nope"};
    CHECK_THROWS_AS(build_synonym_graph(index, unknown), DataError);
}

TEST_CASE("chain of five splits under distance three")
{
    auto g = graph_of({"a", "b", "c", "d", "e"}, {{0, 1, 0.3}, {1, 2, 0.3}, {2, 3, 0.3}, {3, 4, 0.3}});
    auto clusters = RankedDistanceClusterer{}.cluster(g, 3);
    CHECK_FALSE(together(clusters, 0, 4));
    std::size_t total = 0;
    for (const auto& c : clusters)
        total += c.size();
    CHECK(total == 5);
}

TEST_CASE("a triangle is one synset")
{
    auto g = graph_of({"a", "b", "c", "d"}, {{0, 1, 0.3}, {1, 2, 0.3}, {0, 2, 0.3}});
    auto clusters = RankedDistanceClusterer{}.cluster(g, 3);
    CHECK(clusters.size() == 2);
    CHECK(together(clusters, 0, 1));
    CHECK(together(clusters, 1, 2));
    CHECK_FALSE(together(clusters, 0, 3));
}

TEST_CASE("random graphs: clusters partition nodes and respect the distance bound")
{
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 20;
        std::vector<std::string> terms;
        for (std::size_t i = 0; i < n; ++i)
            terms.push_back("t" + std::to_string(i));
        std::vector<SynonymEdge> edges;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (rng() % 5 == 0)
                    edges.push_back({a, b, 0.21 + double(rng() % 100) / 100.0});
            }
        }
        auto g = graph_of(terms, edges);
        const std::size_t K = 1 + rng() % 3;
        auto clusters = RankedDistanceClusterer{}.cluster(g, K);
        std::vector<int> seen(n, 0);
        for (const auto& c : clusters) {
            for (auto v : c)
                ++seen[v];
            // BFS inside the cluster from each member.
            for (auto src : c) {
                std::vector<std::size_t> dist(n, SIZE_MAX);
                std::vector<std::size_t> queue{src};
                dist[src] = 0;
                for (std::size_t q = 0; q < queue.size(); ++q) {
                    for (auto [v, w] : g.adjacency[queue[q]]) {
                        if (dist[v] == SIZE_MAX && std::find(c.begin(), c.end(), v) != c.end()) {
                            dist[v] = dist[queue[q]] + 1;
                            queue.push_back(v);
                        }
                    }
                }
                for (auto v : c)
                    CHECK(dist[v] <= K);
            }
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    }
}

TEST_CASE("synset assembly orders by count and puts the product first")
{
    auto g = graph_of({"screen", "panel", "remote"}, {{0, 1, 0.4}});
    Clusters clusters{{0, 1}, {2}};
    std::unordered_map<std::string, std::uint64_t> counts{{"screen", 50}, {"panel", 70}, {"remote", 200}, {"tv", 90}};
    std::vector<std::string> products{"tv"};
    auto synsets = assemble_synsets(g, clusters, products, counts);
    REQUIRE(synsets.size() == 3);
    CHECK(synsets[0].is_product);
    CHECK(synsets[0].terms == std::vector<std::string>{"tv"});
    CHECK(synsets[1].terms == std::vector<std::string>{"remote"});
    CHECK(synsets[2].terms == std::vector<std::string>{"panel", "screen"});
    CHECK(synsets[2].c == 120);
    CHECK(synset_index(synsets).at("screen") == 2);
    CHECK(synsets_from_json(synsets_to_json(synsets)) == synsets);

    CHECK_THROWS_AS(assemble_synsets(g, clusters, {}, counts), DataError);
    Clusters missing{{0, 1}};
    CHECK_THROWS_AS(assemble_synsets(g, missing, products, counts), DataError);
    counts["remote"] = 0;
    CHECK_THROWS_AS(assemble_synsets(g, clusters, products, counts), DataError);
}

TEST_CASE("unknown clusterer is a usage error")
{
    CHECK(make_clusterer("ranked-distance")->name() == "ranked-distance");
    CHECK_THROWS_AS(make_clusterer("louvain"), UsageError);
}
