#include "meronomy/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/tokenizer.hpp>

#include "meronomy/common.hpp"
#include "meronomy/corpus.hpp"

namespace meronomy {

bool RelationJudgment::majority() const
{
    const auto yes = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
    return 2 * yes > labels.size();
}

namespace {

std::vector<std::string> csv_fields(const std::string& line)
{
    using Sep = boost::escaped_list_separator<char>;
    boost::tokenizer<Sep> tok(line, Sep('\\', ',', '"'));
    std::vector<std::string> out;
    for (auto field : tok) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    return out;
}

bool parse_label(const std::string& raw, const std::string& where)
{
    const auto v = ascii_lower(raw);
    if (v == "true" || v == "yes" || v == "1" || v == "t" || v == "y")
        return true;
    if (v == "false" || v == "no" || v == "0" || v == "f" || v == "n")
        return false;
    throw DataError(where + ": unrecognised rater label '" + raw + "'");
}

} // namespace

std::vector<RelationJudgment> load_judgments_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw DataError(path.string() + ": empty judgments file");
    std::vector<std::string> header;
    try {
        header = csv_fields(line);
    } catch (const boost::escaped_list_error& e) {
        throw DataError(path.string() + ":1: " + e.what());
    }
    std::optional<std::size_t> parent, child, method, product;
    std::vector<std::size_t> raters;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto h = ascii_lower(header[i]);
        if (h == "relation_parent")
            parent = i;
        else if (h == "relation_child")
            child = i;
        else if (h == "method")
            method = i;
        else if (h == "product")
            product = i;
        else if (h.rfind("rater", 0) == 0)
            raters.push_back(i);
    }
    if (!parent || !child || !method || raters.empty())
        throw DataError(path.string() + ": header needs relation_parent, relation_child, method and rater columns");

    std::vector<RelationJudgment> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        std::vector<std::string> f;
        try {
            f = csv_fields(line);
        } catch (const boost::escaped_list_error& e) {
            throw DataError(where + ": " + e.what());
        }
        if (f.size() != header.size())
            throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(f.size()));
        RelationJudgment j;
        j.parent = normalize_term(f[*parent]);
        j.child = normalize_term(f[*child]);
        j.method = f[*method];
        j.product = product ? f[*product] : "";
        for (auto r : raters)
            j.labels.push_back(parse_label(f[r], where));
        out.push_back(std::move(j));
    }
    return out;
}

double precision(std::size_t true_count, std::size_t total)
{
    if (total == 0)
        throw DataError("precision of an empty relation set is undefined");
    if (true_count > total)
        throw DataError("more true relations than relations");
    return 100.0 * static_cast<double>(true_count) / static_cast<double>(total);
}

double precision(std::span<const RelationJudgment> judgments)
{
    const auto yes = std::count_if(judgments.begin(), judgments.end(), [](const auto& j) { return j.majority(); });
    return precision(static_cast<std::size_t>(yes), judgments.size());
}

namespace {

using Relation = std::pair<std::string, std::string>;

std::set<Relation> true_set(std::span<const RelationJudgment> judgments, const std::string* method)
{
    std::set<Relation> out;
    for (const auto& j : judgments) {
        if ((!method || j.method == *method) && j.majority())
            out.emplace(j.parent, j.child);
    }
    return out;
}

} // namespace

std::optional<double> relative_recall(std::span<const RelationJudgment> judgments, const std::string& method)
{
    const auto pooled = true_set(judgments, nullptr);
    if (pooled.empty())
        return std::nullopt;
    return 100.0 * static_cast<double>(true_set(judgments, &method).size()) / static_cast<double>(pooled.size());
}

double f1(double p, double r)
{
    if (p + r == 0.0)
        return 0.0;
    return 2.0 * p * r / (p + r);
}

double macro_f1(std::span<const double> scores)
{
    if (scores.empty())
        throw DataError("macro average of an empty list");
    double sum = 0.0;
    for (double s : scores)
        sum += s;
    return sum / static_cast<double>(scores.size());
}

std::optional<double> fleiss_kappa(const std::vector<std::vector<std::size_t>>& counts)
{
    if (counts.size() < 2)
        return std::nullopt;
    const std::size_t k = counts.front().size();
    std::size_t raters = 0;
    for (auto c : counts.front())
        raters += c;
    if (raters < 2)
        throw DataError("Fleiss's kappa needs at least two ratings per item");
    std::vector<double> column(k, 0.0);
    double agreement = 0.0;
    for (const auto& row : counts) {
        if (row.size() != k)
            throw DataError("ragged rating matrix");
        std::size_t sum = 0;
        double sq = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            sum += row[j];
            sq += static_cast<double>(row[j]) * static_cast<double>(row[j]);
            column[j] += static_cast<double>(row[j]);
        }
        if (sum != raters)
            throw DataError("every item must be rated by the same number of raters");
        const double m = static_cast<double>(raters);
        agreement += (sq - m) / (m * (m - 1.0));
    }
    const double N = static_cast<double>(counts.size());
    const double p_bar = agreement / N;
    double p_e = 0.0;
    for (double c : column) {
        const double p = c / (N * static_cast<double>(raters));
        p_e += p * p;
    }
    if (p_e >= 1.0)
        return std::nullopt;
    return (p_bar - p_e) / (1.0 - p_e);
}

std::optional<double> fleiss_kappa(std::span<const std::vector<bool>> labels)
{
    std::vector<std::vector<std::size_t>> counts;
    for (const auto& item : labels) {
        const auto yes = static_cast<std::size_t>(std::count(item.begin(), item.end(), true));
        counts.push_back({yes, item.size() - yes});
    }
    return fleiss_kappa(counts);
}

EvaluationReport evaluate_judgments(std::span<const RelationJudgment> judgments)
{
    if (judgments.empty())
        throw DataError("no judgments to evaluate");
    EvaluationReport report;
    std::set<std::string> products, methods;
    for (const auto& j : judgments) {
        products.insert(j.product);
        methods.insert(j.method);
    }
    report.products.assign(products.begin(), products.end());
    report.methods.assign(methods.begin(), methods.end());

    std::map<std::string, std::vector<double>> per_product_f1;
    for (const auto& p : report.products) {
        std::vector<RelationJudgment> slice;
        for (const auto& j : judgments) {
            if (j.product == p)
                slice.push_back(j);
        }
        const auto pooled = true_set(slice, nullptr).size();
        for (const auto& m : report.methods) {
            std::vector<RelationJudgment> mine;
            for (const auto& j : slice) {
                if (j.method == m)
                    mine.push_back(j);
            }
            auto& total = report.totals[m];
            total.pooled += pooled;
            if (mine.empty())
                continue;
            MethodScore s;
            s.total = mine.size();
            s.true_count = true_set(mine, nullptr).size();
            s.pooled = pooled;
            s.precision = precision(mine);
            s.recall = relative_recall(slice, m);
            s.f1 = f1(s.precision, s.recall.value_or(0.0));
            total.total += s.total;
            total.true_count += s.true_count;
            per_product_f1[m].push_back(s.f1);
            report.scores[p][m] = s;
        }
    }
    for (auto& [m, total] : report.totals) {
        std::size_t yes = 0;
        std::size_t all = 0;
        for (const auto& j : judgments) {
            if (j.method == m) {
                ++all;
                yes += j.majority() ? 1 : 0;
            }
        }
        total.precision = precision(yes, all);
        if (total.pooled > 0)
            total.recall = 100.0 * static_cast<double>(total.true_count) / static_cast<double>(total.pooled);
        total.f1 = macro_f1(per_product_f1[m]);
    }

    std::vector<std::vector<bool>> labels;
    for (const auto& j : judgments)
        labels.push_back(j.labels);
    const auto width = labels.front().size();
    if (std::all_of(labels.begin(), labels.end(), [&](const auto& l) { return l.size() == width; }))
        report.kappa = fleiss_kappa(labels);
    return report;
}

namespace {

nlohmann::json score_json(const MethodScore& s)
{
    return {{"true", s.true_count},
            {"relations", s.total},
            {"pooled_true", s.pooled},
            {"precision", s.precision},
            {"recall", s.recall ? nlohmann::json(*s.recall) : nlohmann::json(nullptr)},
            {"f1", s.f1}};
}

std::string fixed2(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string pad(std::string s, std::size_t width)
{
    if (s.size() < width)
        s.insert(0, width - s.size(), ' ');
    return s;
}

} // namespace

nlohmann::json EvaluationReport::to_json() const
{
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [p, row] : scores) {
        nlohmann::json r = nlohmann::json::object();
        for (const auto& [m, s] : row)
            r[m] = score_json(s);
        per[p.empty() ? "-" : p] = r;
    }
    nlohmann::json tot = nlohmann::json::object();
    for (const auto& [m, s] : totals)
        tot[m] = score_json(s);
    return {{"format", "meronomy.evaluation"},
            {"version", 1},
            {"products", per},
            {"total", tot},
            {"fleiss_kappa", kappa ? nlohmann::json(*kappa) : nlohmann::json(nullptr)}};
}

std::string EvaluationReport::to_text() const
{
    std::ostringstream out;
    std::size_t name_width = 7;
    for (const auto& p : products)
        name_width = std::max(name_width, p.size());
    out << pad("", name_width);
    for (const auto& m : methods)
        out << " | " << pad(m, 23);
    out << '\n' << pad("", name_width);
    for (std::size_t i = 0; i < methods.size(); ++i)
        out << " | " << pad("P", 7) << pad("R", 8) << pad("F1", 8);
    out << '\n';
    auto row = [&](const std::string& label, auto get) {
        out << pad(label, name_width);
        for (const auto& m : methods) {
            const MethodScore* s = get(m);
            if (!s) {
                out << " | " << pad("-", 7) << pad("-", 8) << pad("-", 8);
                continue;
            }
            out << " | " << pad(fixed2(s->precision), 7) << pad(s->recall ? fixed2(*s->recall) : "n/a", 8)
                << pad(fixed2(s->f1), 8);
        }
        out << '\n';
    };
    for (const auto& p : products) {
        row(p.empty() ? "-" : p, [&](const std::string& m) -> const MethodScore* {
            auto it = scores.find(p);
            if (it == scores.end())
                return nullptr;
            auto jt = it->second.find(m);
            return jt == it->second.end() ? nullptr : &jt->second;
        });
    }
    row("Total", [&](const std::string& m) -> const MethodScore* {
        auto it = totals.find(m);
        return it == totals.end() ? nullptr : &it->second;
    });
    out << "Fleiss kappa: " << (kappa ? fixed2(*kappa) : std::string("undefined")) << '\n';
    return out.str();
}

std::vector<QAInstance> load_qa_jsonl(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::vector<QAInstance> out;
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
        QAInstance q;
        q.question = j.value("question", "");
        q.answer = j.value("answer", "");
        q.category = j.value("category", "");
        if (q.question.empty() || q.answer.empty())
            throw DataError(where + ": question and answer must be non-empty");
        out.push_back(std::move(q));
    }
    return out;
}

nlohmann::json QAResult::to_json() const
{
    return {{"format", "meronomy.qa_eval"},
            {"version", 1},
            {"instances", instances},
            {"aspect_hits", aspect_hits},
            {"relation_hits", relation_hits},
            {"p_a", p_a},
            {"p_r", p_r}};
}

namespace {

bool mentions(const std::vector<std::string>& text, const std::vector<std::string>& term)
{
    if (term.empty() || term.size() > text.size())
        return false;
    return std::search(text.begin(), text.end(), term.begin(), term.end()) != text.end();
}

} // namespace

QAResult qa_eval(const Ontology& ontology, std::span<const QAInstance> instances)
{
    if (instances.empty())
        throw DataError("no Q&A instances to evaluate");
    // Node terms as token runs.
    std::vector<std::vector<std::vector<std::string>>> node_terms(ontology.nodes.size());
    for (const auto& n : ontology.nodes) {
        for (const auto& t : n.terms)
            node_terms[n.id].push_back(expand_phrases(std::vector<std::string>{t}));
    }
    QAResult result;
    result.instances = instances.size();
    const auto count = static_cast<std::ptrdiff_t>(instances.size());
    std::size_t aspect_hits = 0, relation_hits = 0;
#pragma omp parallel for reduction(+ : aspect_hits, relation_hits) schedule(dynamic, 32)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto& qa = instances[static_cast<std::size_t>(i)];
        const auto q = tokenize(qa.question);
        const auto a = tokenize(qa.answer);
        std::vector<char> in_q(ontology.nodes.size(), 0), in_a(ontology.nodes.size(), 0);
        for (std::size_t n = 0; n < node_terms.size(); ++n) {
            for (const auto& t : node_terms[n]) {
                in_q[n] = in_q[n] || mentions(q, t);
                in_a[n] = in_a[n] || mentions(a, t);
            }
        }
        bool aspect = false, relation = false;
        for (std::size_t n = 0; n < node_terms.size(); ++n) {
            aspect = aspect || in_q[n] || in_a[n];
            const auto& parent = ontology.nodes[n].parent;
            relation = relation || (parent && in_a[n] && in_q[*parent]);
        }
        aspect_hits += aspect ? 1 : 0;
        relation_hits += relation ? 1 : 0;
    }
    result.aspect_hits = aspect_hits;
    result.relation_hits = relation_hits;
    result.p_a = 100.0 * static_cast<double>(aspect_hits) / static_cast<double>(result.instances);
    result.p_r = 100.0 * static_cast<double>(relation_hits) / static_cast<double>(result.instances);
    return result;
}

} // namespace meronomy
