#include "meronomy/ontology.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "meronomy/common.hpp"

namespace meronomy {

VoteMatrix accumulate_votes(std::span<const kernels::PairVote> votes, std::span<const std::uint64_t> c,
                            kernels::Backend backend)
{
    const std::size_t n = c.size();
    VoteMatrix vm;
    vm.n = n;
    vm.c.assign(c.begin(), c.end());
    kernels::VoteTotals totals;
    try {
        totals = kernels::accumulate_votes(votes, n, backend);
    } catch (const std::out_of_range& e) {
        throw DataError(std::string("relation vote outside the synset range: ") + e.what());
    }
    vm.v = std::move(totals.v);
    vm.pairs = std::move(totals.pairs);
    return vm;
}

std::vector<kernels::PairVote> pair_votes(std::span<const ScoreRecord> records,
                                          const std::unordered_map<std::string, std::size_t>& synset_of)
{
    auto lookup = [&](const ScoreRecord& r, const std::string& term) {
        auto it = synset_of.find(term);
        if (it == synset_of.end())
            throw DataError("relation record for sentence " + r.sentence_id + " names '" + term +
                            "', which belongs to no synset");
        return static_cast<std::uint32_t>(it->second);
    };
    std::vector<kernels::PairVote> out;
    for (const auto& r : records) {
        if (r.task != Task::relation)
            continue;
        const auto a = lookup(r, r.subject.at(0));
        const auto b = lookup(r, r.subject.at(1));
        if (a == b)
            continue;
        out.push_back({a, b, r.votes.p1, r.votes.p2});
    }
    return out;
}

RelationMatrix relation_matrix(const VoteMatrix& vm)
{
    for (std::size_t i = 0; i < vm.n; ++i) {
        if (vm.c[i] == 0)
            throw DataError("synset " + std::to_string(i) + " has no corpus occurrences");
    }
    RelationMatrix R;
    R.n = vm.n;
    R.r.assign(vm.n * vm.n, 0.0);
    for (std::size_t i = 0; i < vm.n; ++i) {
        for (std::size_t j = 0; j < vm.n; ++j) {
            if (i == j || vm.pair_count(i, j) == 0)
                continue;
            R.r[i * vm.n + j] = vm.vote(i, j) / static_cast<double>(vm.c[i] + vm.c[j]);
        }
    }
    return R;
}

std::size_t super_synset(const RelationMatrix& R, std::size_t i, std::size_t product)
{
    std::size_t best = product;
    double best_score = 0.0;
    for (std::size_t j = 0; j < R.n; ++j) {
        if (j == i)
            continue;
        const double s = R.at(i, j);
        if (s <= 0.0)
            continue;
        const bool better = s > best_score ||
                            (s == best_score && best != product && (j == product || j < best));
        if (better) {
            best = j;
            best_score = s;
        }
    }
    return best;
}

std::vector<std::size_t> OntologyTree::children(std::size_t node) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < parent.size(); ++i) {
        if (parent[i] && *parent[i] == node)
            out.push_back(i);
    }
    return out;
}

bool OntologyTree::is_descendant(std::size_t node, std::size_t ancestor) const
{
    std::size_t steps = 0;
    auto p = parent.at(node);
    while (p && steps++ <= parent.size()) {
        if (*p == ancestor)
            return true;
        p = parent[*p];
    }
    return false;
}

bool OntologyTree::is_valid_tree() const
{
    if (root >= parent.size() || parent[root])
        return false;
    for (std::size_t i = 0; i < parent.size(); ++i) {
        if (i == root)
            continue;
        if (!parent[i] || *parent[i] >= parent.size())
            return false;
        // Walking up must reach the root within N steps.
        std::size_t cur = i;
        std::size_t steps = 0;
        while (cur != root) {
            if (!parent[cur] || ++steps > parent.size())
                return false;
            cur = *parent[cur];
        }
    }
    return true;
}

OntologyTree build_tree(const RelationMatrix& R, std::size_t product)
{
    if (product >= R.n)
        throw DataError("product synset index out of range");
    OntologyTree tree;
    tree.root = product;
    tree.parent.assign(R.n, std::nullopt);

    struct Candidate {
        std::size_t s;
        std::size_t super;
        double score;
    };
    std::vector<Candidate> order;
    for (std::size_t s = 0; s < R.n; ++s) {
        if (s == product)
            continue;
        const auto sup = super_synset(R, s, product);
        order.push_back({s, sup, R.at(s, sup)});
    }
    std::sort(order.begin(), order.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.score != b.score)
            return a.score > b.score;
        const bool ap = a.super == product, bp = b.super == product;
        if (ap != bp)
            return ap;
        return a.s < b.s;
    });

    for (const auto& c : order) {
        if (c.super == c.s || tree.is_descendant(c.super, c.s))
            tree.parent[c.s] = product; // loop in super relations
        else
            tree.parent[c.s] = c.super;
    }
    return tree;
}

std::size_t Ontology::root() const
{
    for (const auto& n : nodes) {
        if (!n.parent)
            return n.id;
    }
    throw DataError("ontology has no root node");
}

std::vector<std::pair<std::string, std::string>> Ontology::relations() const
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& n : nodes) {
        if (n.parent)
            out.emplace_back(nodes.at(*n.parent).display_term, n.display_term);
    }
    return out;
}

nlohmann::json Ontology::to_json() const
{
    auto arr = nlohmann::json::array();
    for (const auto& n : nodes) {
        nlohmann::json prominence = nlohmann::json::array();
        for (const auto& [term, count] : n.prominence)
            prominence.push_back({{"term", term}, {"count", count}});
        arr.push_back({{"id", n.id},
                       {"terms", n.terms},
                       {"parent_id", n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr)},
                       {"prominence", prominence},
                       {"display_term", n.display_term}});
    }
    return {{"format", "meronomy.ontology"},
            {"version", 1},
            {"config_hash", config_hash},
            {"product", product},
            {"nodes", arr}};
}

Ontology Ontology::from_json(const nlohmann::json& j)
{
    if (j.value("format", "") != "meronomy.ontology")
        throw DataError("not a meronomy ontology file");
    Ontology o;
    try {
        o.product = j.at("product").get<std::string>();
        o.config_hash = j.value("config_hash", "");
        for (const auto& e : j.at("nodes")) {
            OntologyNode n;
            n.id = e.at("id").get<std::size_t>();
            n.terms = e.at("terms").get<std::vector<std::string>>();
            if (!e.at("parent_id").is_null())
                n.parent = e.at("parent_id").get<std::size_t>();
            for (const auto& p : e.at("prominence"))
                n.prominence.emplace_back(p.at("term").get<std::string>(), p.at("count").get<std::uint64_t>());
            n.display_term = e.at("display_term").get<std::string>();
            if (n.id != o.nodes.size())
                throw DataError("ontology node ids must be consecutive from 0");
            o.nodes.push_back(std::move(n));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed ontology: ") + e.what());
    }
    OntologyTree t;
    t.parent.resize(o.nodes.size());
    for (const auto& n : o.nodes)
        t.parent[n.id] = n.parent;
    t.root = o.root();
    if (!t.is_valid_tree())
        throw DataError("ontology nodes do not form a rooted tree");
    return o;
}

Ontology assemble_ontology(std::string product, std::span<const Synset> synsets, const OntologyTree& tree,
                           const std::unordered_map<std::string, std::uint64_t>& counts, std::string config_hash)
{
    if (tree.parent.size() != synsets.size())
        throw DataError("tree and synset list differ in size");
    Ontology o;
    o.product = std::move(product);
    o.config_hash = std::move(config_hash);
    for (const auto& s : synsets) {
        OntologyNode n;
        n.id = s.id;
        n.terms = s.terms;
        n.parent = tree.parent.at(s.id);
        for (const auto& t : s.terms) {
            auto it = counts.find(t);
            n.prominence.emplace_back(t, it == counts.end() ? 0 : it->second);
        }
        std::stable_sort(n.prominence.begin(), n.prominence.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        n.display_term = n.prominence.empty() ? "" : n.prominence.front().first;
        o.nodes.push_back(std::move(n));
    }
    return o;
}

namespace {

using TermSet = std::vector<std::string>;

TermSet sorted_terms(std::vector<std::string> terms)
{
    std::sort(terms.begin(), terms.end());
    return terms;
}

std::string show(const TermSet& s)
{
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i)
        out += (i ? "," : "") + s[i];
    return out + "}";
}

} // namespace

std::vector<std::string> compare_to_reference(const Ontology& ontology, const SeedOntology& reference,
                                              std::size_t product)
{
    std::map<TermSet, std::optional<TermSet>> want;
    std::vector<TermSet> ref_sets(reference.nodes().size());
    for (std::size_t i = 0; i < reference.nodes().size(); ++i)
        ref_sets[i] = sorted_terms(reference.nodes()[i].terms);
    for (std::size_t i = 0; i < reference.nodes().size(); ++i) {
        const auto& node = reference.nodes()[i];
        if (node.product != product)
            continue;
        want[ref_sets[i]] = node.parent ? std::optional<TermSet>(ref_sets[*node.parent]) : std::nullopt;
    }

    std::map<TermSet, std::optional<TermSet>> got;
    for (const auto& n : ontology.nodes) {
        got[sorted_terms(n.terms)] =
            n.parent ? std::optional<TermSet>(sorted_terms(ontology.nodes.at(*n.parent).terms)) : std::nullopt;
    }

    std::vector<std::string> diffs;
    for (const auto& [terms, parent] : want) {
        auto it = got.find(terms);
        if (it == got.end()) {
            diffs.push_back("missing synset " + show(terms));
            continue;
        }
        if (it->second != parent)
            diffs.push_back("synset " + show(terms) + " has parent " +
                            (it->second ? show(*it->second) : std::string("none")) + ", expected " +
                            (parent ? show(*parent) : std::string("none")));
    }
    for (const auto& [terms, parent] : got) {
        if (!want.count(terms))
            diffs.push_back("unexpected synset " + show(terms));
    }
    return diffs;
}

nlohmann::json relation_matrix_to_json(const VoteMatrix& vm, const RelationMatrix& R)
{
    return {{"n", vm.n}, {"c", vm.c}, {"pairs", vm.pairs}, {"v", vm.v}, {"r", R.r}};
}

} // namespace meronomy
