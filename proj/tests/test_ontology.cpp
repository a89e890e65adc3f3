#include <doctest.h>

#include <cmath>
#include <random>

#include "meronomy/common.hpp"
#include "meronomy/ontology.hpp"

using namespace meronomy;

namespace {

RelationMatrix matrix(std::size_t n, std::initializer_list<std::tuple<std::size_t, std::size_t, double>> cells)
{
    RelationMatrix R{n, std::vector<double>(n * n, 0.0)};
    for (auto [i, j, v] : cells)
        R.r[i * n + j] = v;
    return R;
}

} // namespace

TEST_CASE("a vote credits both directions")
{
    std::vector<kernels::PairVote> votes{{0, 1, 0.3, 0.5}};
    std::vector<std::uint64_t> c{10, 10};
    auto vm = accumulate_votes(votes, c);
    // (s_0, s_1) with p = (0.2, 0.3, 0.5): v_{1,0} += 0.3, v_{0,1} += 0.5
    CHECK(vm.vote(1, 0) == 0.3);
    CHECK(vm.vote(0, 1) == 0.5);
    CHECK(vm.pair_count(0, 1) == 1);
    CHECK(vm.pair_count(1, 0) == 1);
    std::vector<std::uint64_t> short_c{10};
    CHECK_THROWS_AS(accumulate_votes(votes, short_c), DataError);
}

TEST_CASE("relation strength normalizes by occurrences")
{
    VoteMatrix vm;
    vm.n = 2;
    vm.v = {0.0, 2.0, 0.0, 0.0};
    vm.pairs = {0, 3, 3, 0};
    vm.c = {10, 10};
    auto R = relation_matrix(vm);
    CHECK(R.at(0, 1) == doctest::Approx(0.1));
    CHECK(R.at(1, 0) == 0.0);
    CHECK(R.at(0, 0) == 0.0);
    vm.c = {0, 10};
    CHECK_THROWS_AS(relation_matrix(vm), DataError);
}

TEST_CASE("pair votes map terms to synsets")
{
    std::unordered_map<std::string, std::size_t> synset_of{{"tv", 0}, {"television", 0}, {"screen", 1}};
    std::vector<ScoreRecord> records{
        {"a", Task::relation, {"screen", "tv"}, {0.1, 0.2, 0.7}},
        {"b", Task::relation, {"tv", "television"}, {1.0, 0.0, 0.0}},
        {"c", Task::aspect, {"tv"}, {0.0, 0.0, 1.0}},
    };
    auto votes = pair_votes(records, synset_of);
    REQUIRE(votes.size() == 1);
    CHECK(votes[0].first == 1);
    CHECK(votes[0].second == 0);
    CHECK(votes[0].p1 == 0.2);
    CHECK(votes[0].p2 == 0.7);
    records.push_back({"d", Task::relation, {"tv", "knob"}, {1.0, 0.0, 0.0}});
    CHECK_THROWS_AS(pair_votes(records, synset_of), DataError);
}

TEST_CASE("super synset picks the strongest related synset")
{
    // 0 watch (product), 1 dial, 2 band, 3 battery, 4 quality, 5 the synset being placed
    auto R = matrix(6, {{5, 0, 0.120}, {5, 1, 0.144}, {5, 2, 0.021}, {5, 3, 0.041}, {5, 4, 0.037}});
    CHECK(super_synset(R, 5, 0) == 1);
    // ties go to the product, then the smaller id
    auto T = matrix(4, {{3, 0, 0.2}, {3, 1, 0.2}, {2, 1, 0.1}, {2, 3, 0.1}});
    CHECK(super_synset(T, 3, 0) == 0);
    CHECK(super_synset(T, 2, 0) == 1);
    // a row without positive entries falls back to the product
    CHECK(super_synset(T, 1, 0) == 0);
}

TEST_CASE("chain tree")
{
    // 0 tv, 1 screen, 2 resolution
    auto R = matrix(3, {{1, 0, 0.3}, {2, 1, 0.2}, {2, 0, 0.1}});
    auto tree = build_tree(R, 0);
    CHECK(tree.is_valid_tree());
    CHECK(tree.root == 0);
    CHECK_FALSE(tree.parent[0].has_value());
    CHECK(tree.parent[1] == 0);
    CHECK(tree.parent[2] == 1);
    CHECK(tree.is_descendant(2, 0));
    CHECK_FALSE(tree.is_descendant(0, 2));
    CHECK(tree.children(1) == std::vector<std::size_t>{2});
}

TEST_CASE("two-cycle attaches the weaker member to the root")
{
    // Hand trace: a=1, b=2. Visit a first (0.3): super(a)=b, b not below a, so a -> b.
    // Then b (0.2): super(b)=a, which now hangs below b, so b -> root.
    auto R = matrix(3, {{1, 2, 0.3}, {2, 1, 0.2}});
    auto tree = build_tree(R, 0);
    CHECK(tree.is_valid_tree());
    CHECK(tree.parent[1] == 2);
    CHECK(tree.parent[2] == 0);
}

TEST_CASE("random relation matrices always give a valid tree")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 30;
        RelationMatrix R{n, std::vector<double>(n * n, 0.0)};
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j && rng() % 3)
                    R.r[i * n + j] = (rng() % 4 == 0) ? 0.25 : u(rng); // repeated values exercise ties
            }
        }
        const std::size_t product = rng() % n;
        auto tree = build_tree(R, product);
        CHECK(tree.root == product);
        CHECK(tree.parent.size() == n);
        CHECK(tree.is_valid_tree());
    }
}

TEST_CASE("tree validity detects cycles and orphans")
{
    OntologyTree t{0, {std::nullopt, 2, 1}};
    CHECK_FALSE(t.is_valid_tree());
    OntologyTree two_roots{0, {std::nullopt, std::nullopt}};
    CHECK_FALSE(two_roots.is_valid_tree());
}

TEST_CASE("relation strength equals mean vote times co-occurrence ratio")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng() % 6;
        std::vector<kernels::PairVote> votes;
        const std::size_t count = rng() % 60;
        for (std::size_t k = 0; k < count; ++k) {
            auto i = static_cast<std::uint32_t>(rng() % n);
            auto j = static_cast<std::uint32_t>((i + 1 + rng() % (n - 1)) % n);
            double a = u(rng), b = u(rng), c = u(rng), s = a + b + c;
            votes.push_back({i, j, b / s, c / s});
        }
        std::vector<std::uint64_t> c(n);
        for (auto& x : c)
            x = 1 + rng() % 50;
        // Every vote's sentence holds one occurrence of each synset.
        for (const auto& v : votes) {
            ++c[v.first];
            ++c[v.second];
        }
        auto vm = accumulate_votes(votes, c);
        auto R = relation_matrix(vm);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const auto nij = vm.pair_count(i, j);
                CHECK(vm.vote(i, j) + vm.vote(j, i) <= double(nij) + 1e-9);
                CHECK(R.at(i, j) >= 0.0);
                CHECK(R.at(i, j) <= 1.0);
                if (i == j || nij == 0)
                    continue;
                const double mean_vote = vm.vote(i, j) / double(nij);
                const double tau = double(nij) / double(c[i] + c[j]);
                CHECK(std::abs(R.at(i, j) - mean_vote * tau) <= 1e-12);
            }
        }
    }
}

TEST_CASE("ontology assembly, serialization and reference comparison")
{
    std::vector<Synset> synsets{
        {0, {"tv", "television"}, true, 100},
        {1, {"screen", "panel"}, false, 60},
        {2, {"resolution"}, false, 20},
    };
    OntologyTree tree{0, {std::nullopt, 0, 1}};
    std::unordered_map<std::string, std::uint64_t> counts{
        {"tv", 70}, {"television", 30}, {"screen", 40}, {"panel", 20}, {"resolution", 20}};
    auto o = assemble_ontology("tv", synsets, tree, counts, "abc");
    CHECK(o.root() == 0);
    CHECK(o.nodes[1].display_term == "screen");
    auto rel = o.relations();
    REQUIRE(rel.size() == 2);
    CHECK(rel[0] == std::pair<std::string, std::string>{"tv", "screen"});
    CHECK(rel[1] == std::pair<std::string, std::string>{"screen", "resolution"});

    auto back = Ontology::from_json(o.to_json());
    CHECK(back.nodes == o.nodes);
    CHECK(back.config_hash == "abc");
    CHECK(o.to_json().dump() == back.to_json().dump());

    auto ref = SeedOntology::from_json(nlohmann::json::parse(R"({"product":"tv","root":{"terms":["tv","television"],
        "children":[{"terms":["panel","screen"],"children":[{"terms":["resolution"]}]}]}})"));
    CHECK(compare_to_reference(o, ref).empty());
    auto wrong = SeedOntology::from_json(nlohmann::json::parse(R"({"product":"tv","root":{"terms":["tv","television"],
        "children":[{"terms":["panel","screen"]},{"terms":["resolution"]}]}})"));
    CHECK_FALSE(compare_to_reference(o, wrong).empty());
}
