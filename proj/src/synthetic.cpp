#include "meronomy/synthetic.hpp"

#include <fstream>
#include <random>

#include "meronomy/common.hpp"

namespace meronomy {

const std::vector<PlantedSynset>& planted_ontology()
{
    static const std::vector<PlantedSynset> tree = {
        {{"television", "tv"}, -1, {"excellent", "fantastic", "wonderful", "superb", "incredible"}},
        {{"screen", "panel"}, 0, {"bright", "vivid", "crisp", "sharp", "stunning"}},
        {{"audio", "acoustics"}, 0, {"rich", "balanced", "mellow", "natural", "clear"}},
        {{"remote", "clicker"}, 0, {"intuitive", "handy", "convenient", "responsive", "clunky"}},
        {{"power_cord", "power_cable"}, 0, {"long", "short", "thick", "thin", "flimsy"}},
        {{"resolution", "pixels"}, 1, {"detailed", "grainy", "blurry", "pixelated", "accurate"}},
        {{"brightness", "backlight"}, 1, {"dim", "dark", "vibrant", "saturated", "faded"}},
        {{"speakers", "speaker"}, 2, {"loud", "quiet", "tinny", "muffled", "booming"}},
        {{"bass", "subwoofer"}, 2, {"deep", "punchy", "powerful", "weak", "subtle"}},
        {{"buttons", "keys"}, 3, {"stiff", "smooth", "loose", "firm", "tiny"}},
        {{"batteries", "battery"}, 3, {"dead", "fresh", "cheap", "durable", "expensive"}},
        {{"adapter", "adapters"}, 4, {"bulky", "compact", "sleek", "secure", "wobbly"}},
    };
    return tree;
}

namespace {

const std::vector<std::string>& single_templates()
{
    static const std::vector<std::string> t = {
        "the {T} is {C}.",
        "the {T} is very {C}.",
        "i think the {T} is {C}.",
        "honestly the {T} is so {C}.",
        "the {T} was {C} and {D}.",
        "i found the {T} to be {C}.",
        "for me the {T} is quite {C}.",
        "in my opinion the {T} is {C}!",
        "we were impressed as the {T} is {C}.",
        "to be fair the {T} is really {C} and {D}.",
    };
    return t;
}

// The two terms sit at least nine tokens apart, so their context windows never overlap.
const std::vector<std::string>& pair_templates()
{
    static const std::vector<std::string> t = {
        "the {A} is {CA} and {DA} and i also think that the {B} is {CB}.",
        "i found the {A} to be {CA} and {DA} but i must say the {B} was {CB}.",
        "honestly the {A} is so {CA} and {DA} while on the other hand the {B} is {CB}.",
        "for me the {A} is {CA} and {DA} and as for the rest the {B} is very {CB}.",
    };
    return t;
}

const std::vector<std::string>& filler_sentences()
{
    static const std::vector<std::string> t = {
        "my {N} loves it!",
        "my {N} is very happy with it.",
        "i bought it for my {N}.",
        "we got it for the {N} and it is great.",
        "it arrived just before the {N}.",
        "i would buy it again.",
        "it was delivered on time.",
        "shipping was fast.",
        "highly recommend it!",
        "no complaints so far.",
    };
    return t;
}

const std::vector<std::string>& other_nouns()
{
    static const std::vector<std::string> n = {"daughter", "husband", "son", "wife", "friend",
                                               "mother", "bedroom", "kitchen", "weekend", "holidays"};
    return n;
}

std::string surface(const std::string& term)
{
    std::string out = term;
    for (auto& c : out) {
        if (c == '_')
            c = ' ';
    }
    return out;
}

void replace_all(std::string& s, const std::string& key, const std::string& value)
{
    for (auto p = s.find(key); p != std::string::npos; p = s.find(key, p + value.size()))
        s.replace(p, key.size(), value);
}

std::string capitalize(std::string s)
{
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z')
        s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

nlohmann::json subtree(const std::vector<PlantedSynset>& tree, int node, int max_depth, int depth)
{
    nlohmann::json children = nlohmann::json::array();
    if (depth < max_depth) {
        for (std::size_t i = 0; i < tree.size(); ++i) {
            if (tree[i].parent == node)
                children.push_back(subtree(tree, static_cast<int>(i), max_depth, depth + 1));
        }
    }
    return {{"terms", tree[static_cast<std::size_t>(node)].terms}, {"children", children}};
}

template <class T, class Rng>
const T& pick(const std::vector<T>& v, Rng& rng)
{
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

} // namespace

SyntheticCorpus generate_planted_corpus(const SyntheticOptions& options)
{
    const auto& tree = planted_ontology();
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Two-term sentences: every parent/child pair twice as often as a sibling pair.
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const int p = tree[i].parent;
        if (p < 0)
            continue;
        pairs.emplace_back(static_cast<int>(i), p);
        pairs.emplace_back(static_cast<int>(i), p);
        for (std::size_t j = i + 1; j < tree.size(); ++j) {
            if (tree[j].parent == p)
                pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    }

    std::vector<std::string> sentences;
    sentences.reserve(options.sentences);
    while (sentences.size() < options.sentences) {
        const double r = unit(rng);
        std::string s;
        if (r < 0.6) {
            const auto& syn = tree[std::uniform_int_distribution<std::size_t>(0, tree.size() - 1)(rng)];
            s = pick(single_templates(), rng);
            replace_all(s, "{T}", surface(pick(syn.terms, rng)));
            const auto& c = pick(syn.cues, rng);
            std::string d = pick(syn.cues, rng);
            while (d == c)
                d = pick(syn.cues, rng);
            replace_all(s, "{C}", c);
            replace_all(s, "{D}", d);
        } else if (r < 0.85) {
            auto [a, b] = pick(pairs, rng);
            if (unit(rng) < 0.5)
                std::swap(a, b);
            const auto& sa = tree[static_cast<std::size_t>(a)];
            const auto& sb = tree[static_cast<std::size_t>(b)];
            s = pick(pair_templates(), rng);
            replace_all(s, "{A}", surface(pick(sa.terms, rng)));
            replace_all(s, "{B}", surface(pick(sb.terms, rng)));
            const auto& ca = pick(sa.cues, rng);
            std::string da = pick(sa.cues, rng);
            while (da == ca)
                da = pick(sa.cues, rng);
            replace_all(s, "{CA}", ca);
            replace_all(s, "{DA}", da);
            replace_all(s, "{CB}", pick(sb.cues, rng));
        } else {
            s = pick(filler_sentences(), rng);
            replace_all(s, "{N}", pick(other_nouns(), rng));
        }
        sentences.push_back(capitalize(std::move(s)));
    }

    SyntheticCorpus out;
    out.sentence_count = sentences.size();
    std::size_t next = 0;
    while (next < sentences.size()) {
        const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        RawReview review;
        char id[32];
        std::snprintf(id, sizeof id, "r%06zu", out.reviews.size() + 1);
        review.id = id;
        review.category = "television";
        for (std::size_t k = 0; k < len && next < sentences.size(); ++k, ++next)
            review.text += (k ? " " : "") + sentences[next];
        out.reviews.push_back(std::move(review));
    }

    out.truth = {{"product", "television"}, {"root", subtree(tree, 0, 10, 0)}};
    out.seed = {{"product", "television"}, {"root", subtree(tree, 0, 1, 0)}};

    for (std::size_t i = 0; i < options.qa_instances; ++i) {
        const auto child = 1 + std::uniform_int_distribution<std::size_t>(0, tree.size() - 2)(rng);
        const auto& c = tree[child];
        const auto& p = tree[static_cast<std::size_t>(c.parent)];
        std::string question, answer;
        switch (i % 4) {
        case 0: // parent asked about, child answered
            question = "How good is the " + surface(pick(p.terms, rng)) + " on this one?";
            answer = "The " + surface(pick(c.terms, rng)) + " is " + pick(c.cues, rng) + ".";
            break;
        case 1: // reversed direction
            question = "Is the " + surface(pick(c.terms, rng)) + " any good?";
            answer = "Yes, and the " + surface(pick(p.terms, rng)) + " is " + pick(p.cues, rng) + " too.";
            break;
        case 2: // one aspect only
            question = "What do you think of the " + surface(pick(c.terms, rng)) + "?";
            answer = "It is " + pick(c.cues, rng) + ".";
            break;
        default: // no aspect
            question = "Does it come with a warranty?";
            answer = "I believe it does for one year.";
            break;
        }
        out.qa.push_back({{"question", question}, {"answer", answer}, {"category", "television"}});
    }
    return out;
}

void write_planted_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f)
            throw DataError("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("reviews.jsonl");
        for (const auto& r : corpus.reviews)
            f << nlohmann::json{{"id", r.id}, {"category", r.category}, {"text", r.text}}.dump() << '\n';
    }
    open("truth.json") << corpus.truth.dump(2) << '\n';
    open("seed.json") << corpus.seed.dump(2) << '\n';
    {
        auto f = open("qa.jsonl");
        for (const auto& q : corpus.qa)
            f << q.dump() << '\n';
    }
}

} // namespace meronomy
