#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "meronomy/annotator.hpp"

namespace meronomy {

/// Class probabilities (p0, p1, p2) for one example.
struct VoteTriple {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;

    static constexpr double kTolerance = 1e-6;

    /// Each component in [0,1] and the sum within kTolerance of 1.
    bool valid() const;
    double aspect_mass() const { return p1 + p2; }
    bool operator==(const VoteTriple&) const = default;
};

inline constexpr VoteTriple kUniformVote{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

/// One scored example as exchanged with external scorers.
struct ScoreRecord {
    std::string sentence_id;
    Task task = Task::aspect;
    std::vector<std::string> subject; // entity, or (a1, a2) in textual order
    VoteTriple votes;
};

nlohmann::json record_to_json(const ScoreRecord& r);
ScoreRecord record_from_json(const nlohmann::json& j);
std::string subject_key(std::span<const std::string> subject);

/// Backend failure. Transient errors (timeouts, busy services) may be retried.
class ScorerError : public std::runtime_error {
public:
    ScorerError(const std::string& what, bool transient) : std::runtime_error(what), transient_(transient) {}
    bool transient() const noexcept { return transient_; }

private:
    bool transient_;
};

/// Produces vote triples for masked examples. Implementations are read-only
/// after construction and may be called concurrently.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual VoteTriple score_aspect(const LabeledExample& example) const = 0;
    virtual VoteTriple score_relation(const LabeledExample& example) const = 0;
    virtual std::string name() const = 0;

    VoteTriple score(const LabeledExample& example) const;
};

/// Multinomial naive Bayes over context features of one task, add-one smoothed.
class ContextModel {
public:
    void add(std::span<const std::string> features, int label);
    /// Uniform when none of the features was seen during training.
    VoteTriple predict(std::span<const std::string> features) const;
    bool trained() const { return examples_ > 0; }

    nlohmann::json to_json() const;
    static ContextModel from_json(const nlohmann::json& j);

private:
    std::array<std::uint64_t, 3> class_examples_{};
    std::array<std::uint64_t, 3> class_features_{};
    std::map<std::string, std::array<std::uint64_t, 3>> counts_;
    std::uint64_t examples_ = 0;
};

/// Context features of a masked example: unigrams within 3 tokens of each
/// mask (side-tagged), the adjacent bigrams, and cue patterns such as "'s",
/// "of this" and "this [MASK]". The masked terms themselves never contribute.
std::vector<std::string> context_features(const LabeledExample& example);

/// GPU-free baseline trained by counting on the distant-supervision data.
class BaselineScorer final : public Scorer {
public:
    static BaselineScorer train(std::span<const LabeledExample> aspect_examples,
                                std::span<const LabeledExample> relation_examples);

    VoteTriple score_aspect(const LabeledExample& example) const override;
    VoteTriple score_relation(const LabeledExample& example) const override;
    std::string name() const override { return "baseline-nb-v1"; }

    nlohmann::json to_json() const;
    static BaselineScorer from_json(const nlohmann::json& j);

private:
    ContextModel aspect_;
    ContextModel relation_;
};

/// Returns the labels implied by a known (planted) ontology as one-hot votes.
class OracleScorer final : public Scorer {
public:
    explicit OracleScorer(SeedOntology truth) : truth_(std::move(truth)) {}

    VoteTriple score_aspect(const LabeledExample& example) const override;
    VoteTriple score_relation(const LabeledExample& example) const override;
    std::string name() const override { return "oracle"; }

private:
    SeedOntology truth_;
};

/// Score records indexed by (task, sentence id, subject).
class ScoreIndex {
public:
    /// Rejects duplicate keys; `origin` names the source in error messages.
    void insert(ScoreRecord record, const std::string& origin = "record");
    const ScoreRecord* find(Task task, const std::string& sentence_id, std::span<const std::string> subject) const;
    std::size_t size() const { return records_.size(); }

private:
    std::unordered_map<std::string, ScoreRecord> records_;
};

/// Reads a ScoreRecord JSONL file. Lines carrying a "_meta" key are skipped.
/// Throws DataError (with the line number) on malformed records, invalid
/// triples, or duplicate keys.
ScoreIndex load_external_scores(const std::filesystem::path& path);
void load_external_scores(const std::filesystem::path& path, ScoreIndex& into);

/// Looks scores up in externally produced record files.
class ExternalScorer final : public Scorer {
public:
    explicit ExternalScorer(ScoreIndex index) : index_(std::move(index)) {}

    VoteTriple score_aspect(const LabeledExample& example) const override;
    VoteTriple score_relation(const LabeledExample& example) const override;
    std::string name() const override { return "external"; }

private:
    VoteTriple lookup(const LabeledExample& example) const;
    ScoreIndex index_;
};

/// Scores every example (in parallel); output order matches input order.
std::vector<ScoreRecord> score_examples(const Scorer& scorer, std::span<const LabeledExample> examples);

} // namespace meronomy
