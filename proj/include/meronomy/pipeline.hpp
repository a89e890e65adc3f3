#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "meronomy/aspects.hpp"
#include "meronomy/common.hpp"
#include "meronomy/embedding.hpp"
#include "meronomy/kernels.hpp"
#include "meronomy/scorer.hpp"

namespace meronomy {

struct PipelineConfig {
    struct Paths {
        std::filesystem::path reviews;
        std::filesystem::path seed;
        std::filesystem::path out_dir = "out";
        std::filesystem::path judgments;
        std::filesystem::path qa;
    } paths;
    struct Corpus {
        std::string category; // empty: keep every category
        std::string field_map = "native";
        int phrase_passes = 2;
        std::uint64_t phrase_min_count = 5;
        double phrase_threshold = 10.0;
    } corpus;
    struct Entities {
        std::size_t top_n = 200;
        std::string tagger = "lexicon";
    } entities;
    struct Annotate {
        std::size_t max_depth = 5;
        std::uint64_t balance_seed = 7;
    } annotate;
    struct Scoring {
        std::string backend = "baseline"; // baseline | oracle | external:<path>[,<path>]
        std::filesystem::path truth;      // planted ontology for the oracle
    } scorer;
    AspectThresholds aspects;
    CbowOptions embedding;
    struct Synsets {
        std::size_t rcs_n = 10;
        double edge_threshold = 0.21;
        std::size_t max_distance = 3;
        std::string clusterer = "ranked-distance";
    } synsets;
    struct OntologyOptions {
        std::string product; // empty: the seed's product name
    } ontology;
    struct Run {
        std::uint64_t seed = 1;
        int threads = 0; // 0: OpenMP default
        std::string kernels = "openmp";
    } run;

    /// Relative paths in the file resolve against the file's directory.
    static PipelineConfig load(const std::filesystem::path& path);
    /// Sets "section.key" from its string form. Throws UsageError for unknown
    /// keys or unparsable values.
    void set(std::string_view dotted_key, const std::string& value);
    std::string get(std::string_view dotted_key) const;

    /// Throws UsageError naming the first out-of-range setting.
    void validate() const;

    /// Every hashed key as "section.key=value" lines, in registry order.
    std::string canonical() const;
    /// FNV-1a of canonical(); the output directory, evaluation inputs and the
    /// thread count do not take part.
    std::string hash() const;
    std::string to_yaml() const;

    kernels::Backend kernel_backend() const;
};

struct ConfigKey {
    std::string section;
    std::string key;
    std::string help;
    bool is_path = false;
    bool hashed = true;

    std::string dotted() const { return section + "." + key; }
    std::string flag() const;
};

/// Every configurable key, in file order.
const std::vector<ConfigKey>& config_keys();

enum class Stage { ingest, entities, annotate, score, aspects, embed, synsets, ontology, evaluate, qa_eval };

const char* stage_name(Stage s);
Stage stage_from_name(std::string_view name);
std::vector<Stage> all_stages();

/// A stage was run before the stage producing its inputs.
class StageDependencyError : public UsageError {
public:
    StageDependencyError(Stage missing, const std::string& what) : UsageError(what), missing_(missing) {}
    Stage missing() const { return missing_; }

private:
    Stage missing_;
};

struct RunOptions {
    bool force = false;   // accept artifacts written under a different config hash
    std::ostream* log = nullptr;
};

class Pipeline {
public:
    /// Validates the config; throws UsageError before any work is done.
    Pipeline(PipelineConfig config, RunOptions options = {});

    void run(Stage stage);
    /// ingest through ontology, then evaluate and qa-eval when their inputs are configured.
    void run_all();

    const PipelineConfig& config() const { return config_; }
    std::filesystem::path artifact(std::string_view name) const;

    std::unique_ptr<Scorer> make_scorer() const;

private:
    void check_inputs(Stage stage) const;
    void log(Stage stage, const std::string& message) const;

    void ingest();
    void entities();
    void annotate();
    void score();
    void aspects();
    void embed();
    void synsets();
    void ontology();
    void evaluate();
    void qa_eval();

    PipelineConfig config_;
    RunOptions options_;
    std::string hash_;
};

} // namespace meronomy
