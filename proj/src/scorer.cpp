#include "meronomy/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>

#include "meronomy/common.hpp"

namespace meronomy {

bool VoteTriple::valid() const
{
    for (double p : {p0, p1, p2}) {
        if (!(p >= 0.0 && p <= 1.0))
            return false;
    }
    return std::abs(p0 + p1 + p2 - 1.0) <= kTolerance;
}

std::string subject_key(std::span<const std::string> subject)
{
    std::string key;
    for (std::size_t i = 0; i < subject.size(); ++i) {
        if (i)
            key += '|';
        key += subject[i];
    }
    return key;
}

nlohmann::json record_to_json(const ScoreRecord& r)
{
    return {
        {"sentence_id", r.sentence_id},
        {"task", task_name(r.task)},
        {"subject", r.subject},
        {"votes", {r.votes.p0, r.votes.p1, r.votes.p2}},
    };
}

ScoreRecord record_from_json(const nlohmann::json& j)
{
    ScoreRecord r;
    try {
        r.sentence_id = j.at("sentence_id").get<std::string>();
        r.task = task_from_name(j.at("task").get<std::string>());
        const auto& subject = j.at("subject");
        r.subject = subject.is_string() ? std::vector<std::string>{subject.get<std::string>()}
                                        : subject.get<std::vector<std::string>>();
        const auto votes = j.at("votes").get<std::vector<double>>();
        if (votes.size() != 3)
            throw DataError("votes must have three components");
        r.votes = VoteTriple{votes[0], votes[1], votes[2]};
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed score record: ") + e.what());
    }
    const std::size_t want = r.task == Task::aspect ? 1 : 2;
    if (r.subject.size() != want)
        throw DataError("score record subject has the wrong arity for its task");
    if (!r.votes.valid())
        throw DataError("vote triple must lie in [0,1] and sum to 1");
    return r;
}

VoteTriple Scorer::score(const LabeledExample& example) const
{
    return example.task == Task::aspect ? score_aspect(example) : score_relation(example);
}

// ---------------------------------------------------------------------------
// Baseline

namespace {

bool in(std::string_view w, std::initializer_list<std::string_view> set)
{
    return std::find(set.begin(), set.end(), w) != set.end();
}

void mask_features(const std::vector<std::string>& t, std::size_t m, const std::string& tag,
                   std::vector<std::string>& out)
{
    const std::size_t n = t.size();
    for (std::size_t d = 1; d <= 3; ++d) {
        if (m >= d)
            out.push_back(tag + ":L:" + t[m - d]);
        if (m + d < n)
            out.push_back(tag + ":R:" + t[m + d]);
    }
    if (m >= 2)
        out.push_back(tag + ":LB:" + t[m - 2] + "_" + t[m - 1]);
    if (m + 2 < n)
        out.push_back(tag + ":RB:" + t[m + 1] + "_" + t[m + 2]);

    const std::string prev = m >= 1 ? t[m - 1] : "";
    const std::string next = m + 1 < n ? t[m + 1] : "";
    const std::string next2 = m + 2 < n ? t[m + 2] : "";
    if (next == "'s")
        out.push_back(tag + ":CUE:poss");
    if ((next == "of" || next == "on" || next == "for") && in(next2, {"this", "the", "my", "these", "its"}))
        out.push_back(tag + ":CUE:" + next + "_det");
    if (in(prev, {"this", "these"}))
        out.push_back(tag + ":CUE:this_mask");
    if (in(prev, {"my", "our", "his", "her"}))
        out.push_back(tag + ":CUE:possessor_mask");
    if (m == 0 || (m == 1 && in(t[0], {"the", "a", "this", "my"})))
        out.push_back(tag + ":CUE:sentence_start");
    if (m + 1 == n)
        out.push_back(tag + ":CUE:sentence_end");
}

} // namespace

std::vector<std::string> context_features(const LabeledExample& example)
{
    std::vector<std::string> out;
    const auto& t = example.tokens;
    if (example.task == Task::aspect) {
        mask_features(t, example.mask_positions.at(0), "M", out);
        return out;
    }
    const std::size_t a = example.mask_positions.at(0);
    const std::size_t b = example.mask_positions.at(1);
    mask_features(t, a, "A1", out);
    mask_features(t, b, "A2", out);
    const std::size_t gap = b - a - 1;
    out.push_back("GAP:" + std::to_string(std::min<std::size_t>(gap, 6)));
    if (gap <= 3) {
        std::string between = "BETWEEN:";
        for (std::size_t k = a + 1; k < b; ++k)
            between += t[k] + (k + 1 < b ? "_" : "");
        out.push_back(between);
    }
    return out;
}

void ContextModel::add(std::span<const std::string> features, int label)
{
    const auto c = static_cast<std::size_t>(label);
    ++class_examples_.at(c);
    ++examples_;
    for (const auto& f : features) {
        ++counts_[f][c];
        ++class_features_[c];
    }
}

VoteTriple ContextModel::predict(std::span<const std::string> features) const
{
    if (examples_ == 0)
        throw ScorerError("baseline scorer has not been trained", false);
    std::array<double, 3> logp{};
    const double vocab = static_cast<double>(counts_.size());
    for (std::size_t c = 0; c < 3; ++c)
        logp[c] = std::log((static_cast<double>(class_examples_[c]) + 1.0) / (static_cast<double>(examples_) + 3.0));
    bool any_known = false;
    for (const auto& f : features) {
        auto it = counts_.find(f);
        if (it == counts_.end())
            continue;
        any_known = true;
        for (std::size_t c = 0; c < 3; ++c)
            logp[c] += std::log((static_cast<double>(it->second[c]) + 1.0) /
                                (static_cast<double>(class_features_[c]) + vocab));
    }
    if (!any_known)
        return kUniformVote;
    const double top = *std::max_element(logp.begin(), logp.end());
    std::array<double, 3> p{};
    double z = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        p[c] = std::exp(logp[c] - top);
        z += p[c];
    }
    return VoteTriple{p[0] / z, p[1] / z, p[2] / z};
}

nlohmann::json ContextModel::to_json() const
{
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [f, c] : counts_)
        counts[f] = c;
    return {{"class_examples", class_examples_}, {"class_features", class_features_}, {"counts", counts}};
}

ContextModel ContextModel::from_json(const nlohmann::json& j)
{
    ContextModel m;
    m.class_examples_ = j.at("class_examples").get<std::array<std::uint64_t, 3>>();
    m.class_features_ = j.at("class_features").get<std::array<std::uint64_t, 3>>();
    for (const auto& [f, c] : j.at("counts").items())
        m.counts_.emplace(f, c.get<std::array<std::uint64_t, 3>>());
    m.examples_ = m.class_examples_[0] + m.class_examples_[1] + m.class_examples_[2];
    return m;
}

BaselineScorer BaselineScorer::train(std::span<const LabeledExample> aspect_examples,
                                     std::span<const LabeledExample> relation_examples)
{
    BaselineScorer s;
    for (const auto& e : aspect_examples) {
        if (e.label)
            s.aspect_.add(context_features(e), *e.label);
    }
    for (const auto& e : relation_examples) {
        if (e.label)
            s.relation_.add(context_features(e), *e.label);
    }
    return s;
}

VoteTriple BaselineScorer::score_aspect(const LabeledExample& example) const
{
    return aspect_.predict(context_features(example));
}

VoteTriple BaselineScorer::score_relation(const LabeledExample& example) const
{
    return relation_.predict(context_features(example));
}

nlohmann::json BaselineScorer::to_json() const
{
    return {{"format", "meronomy.baseline_scorer"}, {"version", 1}, {"aspect", aspect_.to_json()},
            {"relation", relation_.to_json()}};
}

BaselineScorer BaselineScorer::from_json(const nlohmann::json& j)
{
    if (j.value("format", "") != "meronomy.baseline_scorer")
        throw DataError("not a baseline scorer model");
    BaselineScorer s;
    s.aspect_ = ContextModel::from_json(j.at("aspect"));
    s.relation_ = ContextModel::from_json(j.at("relation"));
    return s;
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

VoteTriple one_hot(int label)
{
    switch (label) {
    case 1:
        return {0.0, 1.0, 0.0};
    case 2:
        return {0.0, 0.0, 1.0};
    default:
        return {1.0, 0.0, 0.0};
    }
}

} // namespace

VoteTriple OracleScorer::score_aspect(const LabeledExample& example) const
{
    return one_hot(truth_.aspect_label(example.entities.at(0)));
}

VoteTriple OracleScorer::score_relation(const LabeledExample& example) const
{
    return one_hot(truth_.relation_label(example.entities.at(0), example.entities.at(1)));
}

// ---------------------------------------------------------------------------
// External

namespace {

std::string index_key(Task task, const std::string& sentence_id, std::span<const std::string> subject)
{
    return std::string(task_name(task)) + '\x1f' + sentence_id + '\x1f' + subject_key(subject);
}

} // namespace

void ScoreIndex::insert(ScoreRecord record, const std::string& origin)
{
    auto key = index_key(record.task, record.sentence_id, record.subject);
    auto [it, inserted] = records_.emplace(std::move(key), std::move(record));
    if (!inserted)
        throw DataError(origin + ": duplicate score for sentence " + it->second.sentence_id + " subject " +
                        subject_key(it->second.subject));
}

const ScoreRecord* ScoreIndex::find(Task task, const std::string& sentence_id,
                                    std::span<const std::string> subject) const
{
    auto it = records_.find(index_key(task, sentence_id, subject));
    return it == records_.end() ? nullptr : &it->second;
}

void load_external_scores(const std::filesystem::path& path, ScoreIndex& into)
{
    std::ifstream in(path);
    if (!in)
        throw ScorerError("cannot open score file: " + path.string(), false);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw DataError(where + ": not a JSON object");
        if (j.contains("_meta"))
            continue;
        ScoreRecord r;
        try {
            r = record_from_json(j);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        into.insert(std::move(r), where);
    }
}

ScoreIndex load_external_scores(const std::filesystem::path& path)
{
    ScoreIndex index;
    load_external_scores(path, index);
    return index;
}

VoteTriple ExternalScorer::lookup(const LabeledExample& example) const
{
    const ScoreRecord* r = index_.find(example.task, example.sentence_id, example.entities);
    if (!r)
        throw ScorerError("no external score for sentence " + example.sentence_id + " subject " +
                              subject_key(example.entities),
                          false);
    return r->votes;
}

VoteTriple ExternalScorer::score_aspect(const LabeledExample& example) const
{
    return lookup(example);
}

VoteTriple ExternalScorer::score_relation(const LabeledExample& example) const
{
    return lookup(example);
}

std::vector<ScoreRecord> score_examples(const Scorer& scorer, std::span<const LabeledExample> examples)
{
    std::vector<ScoreRecord> out(examples.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto n = static_cast<std::ptrdiff_t>(examples.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& e = examples[static_cast<std::size_t>(i)];
        try {
            ScoreRecord r{e.sentence_id, e.task, e.entities, scorer.score(e)};
            if (!r.votes.valid())
                throw ScorerError(scorer.name() + " returned an invalid vote triple", false);
            out[static_cast<std::size_t>(i)] = std::move(r);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

} // namespace meronomy
