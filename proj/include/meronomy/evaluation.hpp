#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "meronomy/ontology.hpp"

namespace meronomy {

/// One rated relation produced by one extraction method.
struct RelationJudgment {
    std::string product;
    std::string parent;
    std::string child;
    std::string method;
    std::vector<bool> labels; // one per rater

    /// Strict majority of the rater labels.
    bool majority() const;
};

/// CSV with header relation_parent, relation_child, method, rater1..raterK and
/// an optional product column. Labels: true/false, yes/no or 1/0.
std::vector<RelationJudgment> load_judgments_csv(const std::filesystem::path& path);

/// Percentage of majority-true relations. Throws DataError on an empty set.
double precision(std::span<const RelationJudgment> judgments);
double precision(std::size_t true_count, std::size_t total);

/// |T_m| / |O| as a percentage, where O is the union of the majority-true
/// relations of every method in `judgments` (one product's worth). Empty when
/// O is empty.
std::optional<double> relative_recall(std::span<const RelationJudgment> judgments, const std::string& method);

/// Harmonic mean of two percentages; 0 when both are 0.
double f1(double precision, double recall);
/// Unweighted mean. Throws DataError on an empty list.
double macro_f1(std::span<const double> scores);

/// Fleiss's kappa from an items × categories count matrix where every row sums
/// to the same number of raters. Empty when undefined (fewer than two items,
/// or all ratings in one category). Throws DataError on ragged rows.
std::optional<double> fleiss_kappa(const std::vector<std::vector<std::size_t>>& counts);
/// Convenience for boolean labels: one row per item, one column per rater.
std::optional<double> fleiss_kappa(std::span<const std::vector<bool>> labels);

struct MethodScore {
    std::size_t true_count = 0;
    std::size_t total = 0;
    std::size_t pooled = 0; // |O_p| (or the sum over products for totals)
    double precision = 0.0;
    std::optional<double> recall;
    double f1 = 0.0;
};

struct EvaluationReport {
    std::vector<std::string> products;
    std::vector<std::string> methods;
    std::map<std::string, std::map<std::string, MethodScore>> scores; // product → method → score
    std::map<std::string, MethodScore> totals;                        // method → pooled P/R, macro F1
    std::optional<double> kappa;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

/// Precision and recall per product and in total across all relations; the
/// total F1 is the macro average over products.
EvaluationReport evaluate_judgments(std::span<const RelationJudgment> judgments);

struct QAInstance {
    std::string question;
    std::string answer;
    std::string category;
};

std::vector<QAInstance> load_qa_jsonl(const std::filesystem::path& path);

struct QAResult {
    std::size_t instances = 0;
    std::size_t aspect_hits = 0;
    std::size_t relation_hits = 0;
    double p_a = 0.0;
    double p_r = 0.0;

    nlohmann::json to_json() const;
};

/// p_a: share of instances whose question or answer mentions an ontology term.
/// p_r: share where a term of some synset appears in the question and a term
/// of one of its child synsets appears in the answer. Matching is on whole
/// tokens; phrase terms match as contiguous token runs. Throws DataError on
/// an empty instance list.
QAResult qa_eval(const Ontology& ontology, std::span<const QAInstance> instances);

} // namespace meronomy
