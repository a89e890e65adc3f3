#include <doctest.h>

#include "meronomy/common.hpp"
#include "meronomy/scorer.hpp"
#include "test_util.hpp"

using namespace meronomy;

namespace {

LabeledExample aspect_example(const std::string& id, const std::string& text, const std::string& entity,
                              std::optional<int> label = {})
{
    auto s = testutil::sentence(id, text);
    auto ex = select_aspect_inputs(std::span(&s, 1), {entity});
    REQUIRE(ex.size() == 1);
    ex[0].label = label;
    return ex[0];
}

LabeledExample relation_example(const std::string& id, const std::string& text, const std::string& a,
                                const std::string& b, std::optional<int> label = {})
{
    auto s = testutil::sentence(id, text);
    auto ex = select_relation_inputs(std::span(&s, 1), {{a, 0}, {b, 1}});
    REQUIRE(ex.size() == 1);
    ex[0].label = label;
    return ex[0];
}

} // namespace

TEST_CASE("vote triple validity")
{
    CHECK(VoteTriple{0.2, 0.3, 0.5}.valid());
    CHECK(kUniformVote.valid());
    CHECK_FALSE(VoteTriple{0.5, 0.5, 0.5}.valid());
    CHECK_FALSE(VoteTriple{-0.1, 0.6, 0.5}.valid());
    CHECK(VoteTriple{0.2, 0.3, 0.5}.aspect_mass() == doctest::Approx(0.8));
}

TEST_CASE("score records round-trip and validate")
{
    ScoreRecord r{"r1#2", Task::relation, {"screen", "tv"}, {0.1, 0.2, 0.7}};
    auto j = record_to_json(r);
    CHECK(j.at("task") == "relation");
    auto back = record_from_json(j);
    CHECK(back.sentence_id == r.sentence_id);
    CHECK(back.subject == r.subject);
    CHECK(back.votes == r.votes);

    auto wrong_arity = j;
    wrong_arity["subject"] = "screen";
    CHECK_THROWS_AS(record_from_json(wrong_arity), DataError);
    auto bad_sum = j;
    bad_sum["votes"] = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(record_from_json(bad_sum), DataError);
    CHECK_THROWS_AS(record_from_json(nlohmann::json{{"task", "aspect"}}), DataError);
}

TEST_CASE("external scores load, skip meta lines and reject duplicates")
{
    testutil::TempDir dir("scores");
    testutil::write_file(dir / "s.jsonl",
                         R"({"_meta":{"format":"meronomy.scores"}})" "\n"
                         R"({"sentence_id":"a","task":"aspect","subject":["screen"],"votes":[0.1,0.2,0.7]})" "\n"
                         R"({"sentence_id":"b","task":"relation","subject":["tv","screen"],"votes":[0.2,0.7,0.1]})" "\n");
    auto index = load_external_scores(dir / "s.jsonl");
    CHECK(index.size() == 2);

    ExternalScorer scorer(std::move(index));
    LabeledExample e;
    e.sentence_id = "a";
    e.entities = {"screen"};
    e.tokens = {"[MASK]"};
    e.mask_positions = {0};
    CHECK(scorer.score(e) == VoteTriple{0.1, 0.2, 0.7});
    e.sentence_id = "missing";
    CHECK_THROWS_AS(scorer.score(e), ScorerError);

    testutil::write_file(dir / "dup.jsonl",
                         R"({"sentence_id":"a","task":"aspect","subject":["screen"],"votes":[0.1,0.2,0.7]})" "\n"
                         R"({"sentence_id":"a","task":"aspect","subject":["screen"],"votes":[0.1,0.2,0.7]})" "\n");
    CHECK_THROWS_AS(load_external_scores(dir / "dup.jsonl"), DataError);
    testutil::write_file(dir / "bad.jsonl", "{oops\n");
    CHECK_THROWS_AS(load_external_scores(dir / "bad.jsonl"), DataError);
}

TEST_CASE("oracle scorer returns one-hot seed labels")
{
    OracleScorer oracle(SeedOntology::from_json(nlohmann::json::parse(
        R"({"product":"tv","root":{"terms":["tv"],"children":[{"terms":["screen"]}]}})")));
    CHECK(oracle.score(aspect_example("a", "the screen is big", "screen")) == VoteTriple{0, 1, 0});
    CHECK(oracle.score(aspect_example("b", "love this tv", "tv")) == VoteTriple{0, 0, 1});
    CHECK(oracle.score(aspect_example("c", "my husband agrees", "husband")) == VoteTriple{1, 0, 0});
    CHECK(oracle.score(relation_example("d", "the screen of this tv", "screen", "tv")) == VoteTriple{0, 0, 1});
    CHECK(oracle.score(relation_example("e", "this tv has a screen", "screen", "tv")) == VoteTriple{0, 1, 0});
}

TEST_CASE("context features ignore the masked term")
{
    auto a = aspect_example("a", "the screen of this tv is great", "screen");
    auto b = aspect_example("b", "the remote of this tv is great", "remote");
    CHECK(context_features(a) == context_features(b));
    auto f = context_features(a);
    CHECK(std::find(f.begin(), f.end(), "screen") == f.end());
}

TEST_CASE("baseline scorer learns context cues")
{
    std::vector<LabeledExample> aspects;
    std::vector<LabeledExample> relations;
    for (int k = 0; k < 30; ++k) {
        const auto n = std::to_string(k);
        aspects.push_back(aspect_example("p" + n, "i love this tv so much", "tv", 2));
        aspects.push_back(aspect_example("f" + n, "the screen is very bright", "screen", 1));
        aspects.push_back(aspect_example("o" + n, "my husband bought it yesterday", "husband", 0));
        relations.push_back(relation_example("r1" + n, "the screen of the tv is bright", "screen", "tv", 2));
        relations.push_back(relation_example("r2" + n, "the tv 's screen is bright", "tv", "screen", 1));
        relations.push_back(relation_example("r0" + n, "the remote and the screen work", "remote", "screen", 0));
    }
    auto model = BaselineScorer::train(aspects, relations);

    auto product = model.score(aspect_example("x", "i love this phone so much", "phone"));
    CHECK(product.valid());
    CHECK(product.p2 > product.p1);
    CHECK(product.p2 > product.p0);
    auto part = model.score(relation_example("y", "the battery of the phone is good", "battery", "phone"));
    CHECK(part.p2 > part.p1);

    // Unknown context falls back to uniform.
    auto unknown = model.score(aspect_example("z", "qqq zzz www", "zzz"));
    CHECK(unknown == kUniformVote);

    auto reloaded = BaselineScorer::from_json(model.to_json());
    CHECK(reloaded.score(aspect_example("x", "i love this phone so much", "phone")) == product);

    CHECK_THROWS_AS(BaselineScorer{}.score(aspects[0]), ScorerError);
}

TEST_CASE("score_examples keeps input order")
{
    OracleScorer oracle(SeedOntology::from_json(nlohmann::json::parse(
        R"({"product":"tv","root":{"terms":["tv"],"children":[{"terms":["screen"]}]}})")));
    std::vector<LabeledExample> ex;
    for (int k = 0; k < 200; ++k)
        ex.push_back(aspect_example(std::to_string(k), k % 2 ? "the screen" : "the tv", k % 2 ? "screen" : "tv"));
    auto records = score_examples(oracle, ex);
    REQUIRE(records.size() == ex.size());
    for (std::size_t k = 0; k < ex.size(); ++k) {
        CHECK(records[k].sentence_id == ex[k].sentence_id);
        CHECK(records[k].votes.p2 == (k % 2 ? 0.0 : 1.0));
    }
}
