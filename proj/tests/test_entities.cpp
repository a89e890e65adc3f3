#include <doctest.h>

#include <map>

#include "meronomy/entities.hpp"
#include "test_util.hpp"

using namespace meronomy;

namespace {

class FixedTagger final : public PosTagger {
public:
    std::vector<bool> noun_mask(const ReviewSentence& s) const override
    {
        if (s.sentence_id == "broken")
            throw TaggerError("cannot tag");
        std::vector<bool> mask;
        for (const auto& t : s.tokens)
            mask.push_back(t.size() > 3);
        return mask;
    }
};

} // namespace

TEST_CASE("lexicon tagger marks nouns")
{
    LexiconTagger tagger;
    auto s = testutil::sentence("s", "The battery of this remote died quickly.");
    auto nouns = tag_nouns(s, tagger);
    CHECK(nouns.count("battery") == 1);
    CHECK(nouns.count("remote") == 1);
    CHECK(nouns.count("the") == 0);
    CHECK(nouns.count("died") == 0);
    CHECK(nouns.count("quickly") == 0);
    CHECK(is_function_word("of"));
    CHECK_FALSE(is_function_word("screen"));
}

TEST_CASE("top entities match a naive recount")
{
    std::vector<ReviewSentence> corpus{
        testutil::sentence("a", "screen screen remote tv"),
        testutil::sentence("b", "remote battery screen"),
        testutil::sentence("broken", "screen screen screen"),
        testutil::sentence("c", "battery cable cable"),
    };
    FixedTagger tagger;
    std::map<std::string, std::uint64_t> naive;
    for (const auto& s : corpus) {
        if (s.sentence_id == "broken")
            continue;
        for (const auto& t : s.tokens) {
            if (t.size() > 3)
                ++naive[t];
        }
    }
    std::size_t warnings = 0;
    auto top = top_entities(corpus, tagger, 10, kernels::Backend::openmp, &warnings);
    CHECK(warnings == 1);
    REQUIRE(top.size() == naive.size());
    for (const auto& e : top)
        CHECK(naive.at(e.entity) == e.count);
    // screen 3, then battery/cable/remote at 2 in lexicographic order
    CHECK(top[0] == EntityCount{"screen", 3});
    CHECK(top[1].entity == "battery");
    CHECK(top[2].entity == "cable");
    CHECK(top[3].entity == "remote");

    auto two = top_entities(corpus, tagger, 2, kernels::Backend::serial);
    CHECK(two.size() == 2);
    CHECK(entities_from_json(entities_to_json(top)) == top);
}
