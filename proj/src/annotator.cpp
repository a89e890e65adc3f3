#include "meronomy/annotator.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "meronomy/common.hpp"

namespace meronomy {

namespace {

void flatten(const nlohmann::json& node_json, std::size_t product, std::optional<std::size_t> parent, std::size_t depth,
             std::size_t max_depth, std::vector<SeedOntology::Node>& nodes)
{
    if (!node_json.is_object() || !node_json.contains("terms"))
        throw DataError("ontology node without a 'terms' list");
    if (depth > max_depth)
        throw DataError("ontology deeper than the configured maximum of " + std::to_string(max_depth));
    SeedOntology::Node node;
    node.product = product;
    node.parent = parent;
    node.depth = depth;
    for (const auto& t : node_json.at("terms")) {
        auto term = normalize_term(t.get<std::string>());
        if (term.empty())
            throw DataError("empty ontology term");
        node.terms.push_back(std::move(term));
    }
    if (node.terms.empty())
        throw DataError("ontology node with no terms");
    const std::size_t index = nodes.size();
    nodes.push_back(std::move(node));
    if (auto it = node_json.find("children"); it != node_json.end()) {
        for (const auto& child : *it)
            flatten(child, product, index, depth + 1, max_depth, nodes);
    }
}

nlohmann::json node_json(std::span<const SeedOntology::Node> nodes, std::size_t index)
{
    nlohmann::json children = nlohmann::json::array();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (nodes[k].parent == index)
            children.push_back(node_json(nodes, k));
    }
    return {{"terms", nodes[index].terms}, {"children", children}};
}

LabeledExample masked_example(const ReviewSentence& s, Task task, std::vector<std::size_t> positions)
{
    LabeledExample e;
    e.sentence_id = s.sentence_id;
    e.task = task;
    e.tokens = s.tokens;
    for (std::size_t p : positions) {
        e.entities.push_back(s.tokens[p]);
        e.tokens[p] = std::string(kMaskToken);
    }
    e.mask_positions = std::move(positions);
    return e;
}

} // namespace

SeedOntology SeedOntology::from_json(const nlohmann::json& j, std::size_t max_depth)
{
    SeedOntology o;
    const auto add_product = [&](const nlohmann::json& pj) {
        if (!pj.is_object() || !pj.contains("root"))
            throw DataError("ontology entry needs 'product' and 'root'");
        const std::size_t product = o.products_.size();
        o.products_.push_back(pj.value("product", "product" + std::to_string(product)));
        const std::size_t first = o.nodes_.size();
        flatten(pj.at("root"), product, std::nullopt, 0, max_depth, o.nodes_);
        std::unordered_set<std::string> seen;
        for (std::size_t k = first; k < o.nodes_.size(); ++k) {
            for (const auto& term : o.nodes_[k].terms) {
                if (!seen.insert(term).second)
                    throw DataError("term '" + term + "' appears twice in product '" + o.products_.back() + "'");
                o.term_nodes_[term].push_back(k);
            }
        }
    };
    try {
        if (j.is_array()) {
            for (const auto& pj : j)
                add_product(pj);
        } else {
            add_product(j);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed ontology JSON: ") + e.what());
    }
    if (o.products_.empty())
        throw DataError("ontology has no products");
    return o;
}

SeedOntology SeedOntology::load(const std::filesystem::path& path, std::size_t max_depth)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open ontology file: " + path.string());
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw DataError("ontology file is not valid JSON: " + path.string());
    return from_json(j, max_depth);
}

bool SeedOntology::contains(std::string_view term) const
{
    return term_nodes_.count(std::string(term)) != 0;
}

std::optional<std::size_t> SeedOntology::node_of(std::string_view term, std::optional<std::size_t> product) const
{
    auto it = term_nodes_.find(std::string(term));
    if (it == term_nodes_.end())
        return std::nullopt;
    if (!product)
        return it->second.front();
    for (std::size_t n : it->second) {
        if (nodes_[n].product == *product)
            return n;
    }
    return std::nullopt;
}

bool SeedOntology::node_is_descendant(std::size_t node, std::size_t ancestor) const
{
    for (auto p = nodes_.at(node).parent; p; p = nodes_[*p].parent) {
        if (*p == ancestor)
            return true;
    }
    return false;
}

bool SeedOntology::is_descendant(std::string_view a1, std::string_view a2) const
{
    auto it1 = term_nodes_.find(std::string(a1));
    if (it1 == term_nodes_.end())
        throw DataError("term not in ontology: " + std::string(a1));
    auto it2 = term_nodes_.find(std::string(a2));
    if (it2 == term_nodes_.end())
        throw DataError("term not in ontology: " + std::string(a2));
    bool same_product = false;
    for (std::size_t n1 : it1->second) {
        for (std::size_t n2 : it2->second) {
            if (nodes_[n1].product != nodes_[n2].product)
                continue;
            same_product = true;
            if (node_is_descendant(n1, n2))
                return true;
        }
    }
    if (!same_product)
        throw DataError("terms '" + std::string(a1) + "' and '" + std::string(a2) + "' belong to different products");
    return false;
}

int SeedOntology::aspect_label(std::string_view term) const
{
    auto it = term_nodes_.find(std::string(term));
    if (it == term_nodes_.end())
        return 0;
    for (std::size_t n : it->second) {
        if (nodes_[n].depth == 0)
            return 2;
    }
    return 1;
}

int SeedOntology::relation_label(std::string_view a1, std::string_view a2) const
{
    auto it1 = term_nodes_.find(std::string(a1));
    auto it2 = term_nodes_.find(std::string(a2));
    if (it1 == term_nodes_.end() || it2 == term_nodes_.end())
        return 0;
    for (std::size_t n1 : it1->second) {
        for (std::size_t n2 : it2->second) {
            if (nodes_[n1].product != nodes_[n2].product)
                continue;
            if (node_is_descendant(n2, n1))
                return 1;
            if (node_is_descendant(n1, n2))
                return 2;
        }
    }
    return 0;
}

nlohmann::json SeedOntology::to_json() const
{
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (!nodes_[k].parent)
            out.push_back({{"product", products_[nodes_[k].product]}, {"root", node_json(nodes_, k)}});
    }
    return out.size() == 1 ? out.front() : out;
}

const char* task_name(Task t)
{
    return t == Task::aspect ? "aspect" : "relation";
}

Task task_from_name(std::string_view name)
{
    if (name == "aspect")
        return Task::aspect;
    if (name == "relation")
        return Task::relation;
    throw DataError("unknown task '" + std::string(name) + "'");
}

void LabeledExample::validate() const
{
    const std::size_t want = task == Task::aspect ? 1 : 2;
    if (mask_positions.size() != want || entities.size() != want)
        throw DataError("example " + sentence_id + ": " + task_name(task) + " examples need exactly " +
                        std::to_string(want) + " mask(s)");
    std::size_t masks = 0;
    for (const auto& t : tokens)
        masks += t == kMaskToken ? 1 : 0;
    if (masks != want)
        throw DataError("example " + sentence_id + ": mask token count does not match mask_positions");
    for (std::size_t p : mask_positions) {
        if (p >= tokens.size() || tokens[p] != kMaskToken)
            throw DataError("example " + sentence_id + ": mask position does not hold the mask token");
    }
    if (want == 2 && mask_positions[0] >= mask_positions[1])
        throw DataError("example " + sentence_id + ": relation masks must be in textual order");
    if (label && (*label < 0 || *label > 2))
        throw DataError("example " + sentence_id + ": label outside {0,1,2}");
}

nlohmann::json example_to_json(const LabeledExample& e)
{
    nlohmann::json j = {
        {"sentence_id", e.sentence_id}, {"task", task_name(e.task)}, {"tokens", e.tokens},
        {"mask_positions", e.mask_positions}, {"entities", e.entities},
    };
    j["label"] = e.label ? nlohmann::json(*e.label) : nlohmann::json(nullptr);
    return j;
}

LabeledExample example_from_json(const nlohmann::json& j)
{
    LabeledExample e;
    try {
        e.sentence_id = j.at("sentence_id").get<std::string>();
        e.task = task_from_name(j.at("task").get<std::string>());
        e.tokens = j.at("tokens").get<std::vector<std::string>>();
        e.mask_positions = j.at("mask_positions").get<std::vector<std::size_t>>();
        e.entities = j.at("entities").get<std::vector<std::string>>();
        if (auto it = j.find("label"); it != j.end() && !it->is_null())
            e.label = it->get<int>();
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("malformed labeled example: ") + ex.what());
    }
    e.validate();
    return e;
}

std::vector<LabeledExample> select_aspect_inputs(std::span<const ReviewSentence> sentences,
                                                 const std::unordered_set<std::string>& frequent_entities)
{
    std::vector<LabeledExample> out;
    for (const auto& s : sentences) {
        std::optional<std::size_t> hit;
        bool ambiguous = false;
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            if (frequent_entities.count(s.tokens[i]) == 0)
                continue;
            if (hit) {
                ambiguous = true;
                break;
            }
            hit = i;
        }
        if (hit && !ambiguous)
            out.push_back(masked_example(s, Task::aspect, {*hit}));
    }
    return out;
}

std::vector<LabeledExample> select_relation_inputs(std::span<const ReviewSentence> sentences,
                                                   const std::unordered_map<std::string, std::size_t>& group_of)
{
    std::vector<LabeledExample> out;
    for (const auto& s : sentences) {
        std::vector<std::size_t> hits;
        for (std::size_t i = 0; i < s.tokens.size() && hits.size() <= 2; ++i) {
            if (group_of.count(s.tokens[i]))
                hits.push_back(i);
        }
        if (hits.size() != 2)
            continue;
        if (group_of.at(s.tokens[hits[0]]) == group_of.at(s.tokens[hits[1]]))
            continue;
        out.push_back(masked_example(s, Task::relation, std::move(hits)));
    }
    return out;
}

std::vector<LabeledExample> generate_aspect_examples(std::span<const ReviewSentence> sentences,
                                                     const SeedOntology& seed,
                                                     std::span<const std::string> frequent_entities)
{
    std::unordered_set<std::string> frequent(frequent_entities.begin(), frequent_entities.end());
    auto examples = select_aspect_inputs(sentences, frequent);
    for (auto& e : examples)
        e.label = seed.aspect_label(e.entities.front());
    return examples;
}

std::vector<LabeledExample> generate_relation_examples(std::span<const ReviewSentence> sentences,
                                                       const SeedOntology& seed)
{
    std::unordered_map<std::string, std::size_t> group_of;
    const auto nodes = seed.nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        for (const auto& term : nodes[k].terms)
            group_of.emplace(term, k);
    }
    auto examples = select_relation_inputs(sentences, group_of);
    for (auto& e : examples)
        e.label = seed.relation_label(e.entities[0], e.entities[1]);
    return examples;
}

std::array<std::size_t, 3> label_histogram(std::span<const LabeledExample> examples)
{
    std::array<std::size_t, 3> h{};
    for (const auto& e : examples) {
        if (e.label && *e.label >= 0 && *e.label <= 2)
            ++h[static_cast<std::size_t>(*e.label)];
    }
    return h;
}

std::vector<LabeledExample> balance_classes(std::span<const LabeledExample> examples, std::uint64_t seed)
{
    std::array<std::vector<std::size_t>, 3> by_label;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& label = examples[i].label;
        if (!label || *label < 0 || *label > 2)
            throw DataError("cannot balance unlabeled example " + examples[i].sentence_id);
        by_label[static_cast<std::size_t>(*label)].push_back(i);
    }
    std::size_t minority = examples.size();
    for (std::size_t l = 0; l < 3; ++l) {
        if (by_label[l].empty())
            throw DataError("cannot balance classes: label " + std::to_string(l) + " has no examples");
        minority = std::min(minority, by_label[l].size());
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> keep;
    for (auto& idx : by_label) {
        // Partial Fisher-Yates: the first `minority` slots become a uniform sample.
        for (std::size_t i = 0; i < minority; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(minority));
    }
    std::sort(keep.begin(), keep.end());
    std::vector<LabeledExample> out;
    out.reserve(keep.size());
    for (std::size_t i : keep)
        out.push_back(examples[i]);
    return out;
}

} // namespace meronomy
