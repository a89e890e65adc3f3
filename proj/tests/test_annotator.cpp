#include <doctest.h>

#include "meronomy/annotator.hpp"
#include "meronomy/common.hpp"
#include "test_util.hpp"

using namespace meronomy;
using Strings = std::vector<std::string>;

namespace {

SeedOntology sweater_seed()
{
    return SeedOntology::from_json(nlohmann::json::parse(R"({
        "product": "sweater",
        "root": {"terms": ["sweater"], "children": [
            {"terms": ["material"], "children": [{"terms": ["fabric"]}]},
            {"terms": ["colour"]},
            {"terms": ["design"]}
        ]}
    })"));
}

} // namespace

TEST_CASE("seed ontology labels")
{
    auto seed = sweater_seed();
    CHECK(seed.product_count() == 1);
    CHECK(seed.aspect_label("sweater") == 2);
    CHECK(seed.aspect_label("fabric") == 1);
    CHECK(seed.aspect_label("daughter") == 0);
    CHECK(seed.is_descendant("fabric", "sweater"));
    CHECK(seed.is_descendant("fabric", "material"));
    CHECK_FALSE(seed.is_descendant("material", "fabric"));
    CHECK_FALSE(seed.is_descendant("colour", "design"));
    CHECK_THROWS_AS(seed.is_descendant("daughter", "sweater"), DataError);
    CHECK(seed.relation_label("sweater", "fabric") == 1);
    CHECK(seed.relation_label("fabric", "sweater") == 2);
    CHECK(seed.relation_label("design", "material") == 0);
    CHECK(seed.relation_label("daughter", "sweater") == 0);
}

TEST_CASE("seed ontology rejects duplicates and deep trees")
{
    CHECK_THROWS_AS(SeedOntology::from_json(nlohmann::json::parse(
                        R"({"product":"p","root":{"terms":["p"],"children":[{"terms":["p"]}]}})")),
                    DataError);
    auto deep = nlohmann::json::parse(R"({"product":"p","root":{"terms":["a"],"children":[
        {"terms":["b"],"children":[{"terms":["c"]}]}]}})");
    CHECK_NOTHROW(SeedOntology::from_json(deep, 2));
    CHECK_THROWS_AS(SeedOntology::from_json(deep, 1), DataError);
}

TEST_CASE("aspect examples from the toy seed")
{
    auto seed = sweater_seed();
    std::vector<ReviewSentence> corpus{
        testutil::sentence("t1", "My daughter loves it!"),
        testutil::sentence("t2", "The material is super soft."),
        testutil::sentence("t3", "I love this sweater."),
    };
    Strings frequent{"daughter", "material", "sweater"};
    auto ex = generate_aspect_examples(corpus, seed, frequent);
    REQUIRE(ex.size() == 3);
    CHECK(ex[0].label == 0);
    CHECK(ex[1].label == 1);
    CHECK(ex[2].label == 2);
    CHECK(ex[0].tokens == Strings{"my", "[MASK]", "loves", "it"});
    CHECK(ex[2].entities == Strings{"sweater"});
    CHECK(ex[2].mask_positions == std::vector<std::size_t>{3});
    for (const auto& e : ex)
        CHECK_NOTHROW(e.validate());
}

TEST_CASE("relation examples from the toy seed")
{
    auto seed = sweater_seed();
    std::vector<ReviewSentence> corpus{
        testutil::sentence("t1", "I like the design and the material."),
        testutil::sentence("t2", "The sweater's fabric is so soft."),
        testutil::sentence("t3", "The colour of the sweater is beautiful."),
        testutil::sentence("t4", "The sweater fabric and colour are fine."), // three mentions
        testutil::sentence("t5", "Nothing relevant here."),
    };
    auto ex = generate_relation_examples(corpus, seed);
    REQUIRE(ex.size() == 3);
    CHECK(ex[0].label == 0);
    CHECK(ex[1].label == 1);
    CHECK(ex[1].entities == Strings{"sweater", "fabric"});
    CHECK(ex[2].label == 2);
    CHECK(ex[2].entities == Strings{"colour", "sweater"});
    CHECK(ex[1].tokens == Strings{"the", "[MASK]", "'s", "[MASK]", "is", "so", "soft"});
}

TEST_CASE("aspect inputs need exactly one frequent entity")
{
    std::vector<ReviewSentence> corpus{
        testutil::sentence("a", "screen and remote"),
        testutil::sentence("b", "the screen"),
    };
    auto ex = select_aspect_inputs(corpus, {"screen", "remote"});
    REQUIRE(ex.size() == 1);
    CHECK(ex[0].sentence_id == "b");
    CHECK_FALSE(ex[0].label.has_value());
}

TEST_CASE("relation inputs skip same-group pairs")
{
    std::vector<ReviewSentence> corpus{
        testutil::sentence("a", "tv and television"),
        testutil::sentence("b", "tv and screen"),
    };
    auto ex = select_relation_inputs(corpus, {{"tv", 0}, {"television", 0}, {"screen", 1}});
    REQUIRE(ex.size() == 1);
    CHECK(ex[0].sentence_id == "b");
}

TEST_CASE("balancing undersamples to the minority class")
{
    std::vector<LabeledExample> ex;
    const std::array<int, 3> sizes{100, 40, 40};
    for (int label = 0; label < 3; ++label) {
        for (int k = 0; k < sizes[label]; ++k) {
            LabeledExample e;
            e.sentence_id = std::to_string(label) + "-" + std::to_string(k);
            e.tokens = {"[MASK]"};
            e.mask_positions = {0};
            e.entities = {"x"};
            e.label = label;
            ex.push_back(e);
        }
    }
    auto kept = balance_classes(ex, 7);
    CHECK(label_histogram(kept) == std::array<std::size_t, 3>{40, 40, 40});
    CHECK(balance_classes(ex, 7) == kept);

    ex.erase(std::remove_if(ex.begin(), ex.end(), [](const auto& e) { return e.label == 2; }), ex.end());
    CHECK_THROWS_AS(balance_classes(ex, 7), DataError);
}

TEST_CASE("labeled examples round-trip through json")
{
    LabeledExample e;
    e.sentence_id = "r1#0";
    e.task = Task::relation;
    e.tokens = {"the", "[MASK]", "of", "the", "[MASK]"};
    e.mask_positions = {1, 4};
    e.entities = {"colour", "sweater"};
    e.label = 2;
    CHECK(example_from_json(example_to_json(e)) == e);

    LabeledExample bad = e;
    bad.entities.pop_back();
    CHECK_THROWS_AS(bad.validate(), DataError);
}
