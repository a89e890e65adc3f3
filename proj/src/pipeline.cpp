#include "meronomy/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <unordered_set>
#include <variant>

#include <omp.h>
#include <yaml-cpp/yaml.h>

#include "meronomy/annotator.hpp"
#include "meronomy/common.hpp"
#include "meronomy/corpus.hpp"
#include "meronomy/entities.hpp"
#include "meronomy/evaluation.hpp"
#include "meronomy/ontology.hpp"
#include "meronomy/synsets.hpp"
#include "meronomy/tagger.hpp"

namespace meronomy {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys = {
        {"paths", "reviews", "review JSONL file", true, true},
        {"paths", "seed", "seed ontology JSON", true, true},
        {"paths", "out_dir", "artifact directory (env MERONOMY_OUT_DIR overrides the file)", true, false},
        {"paths", "judgments", "relation judgments CSV for evaluate", true, false},
        {"paths", "qa", "Q&A JSONL for qa-eval", true, false},
        {"corpus", "category", "keep only reviews of this category", false, true},
        {"corpus", "field_map", "review field names: native or amazon", false, true},
        {"corpus", "phrase_passes", "phrase detection passes (1 or 2)", false, true},
        {"corpus", "phrase_min_count", "phrase detection min_count", false, true},
        {"corpus", "phrase_threshold", "phrase detection score threshold", false, true},
        {"entities", "top_n", "number of frequent noun entities", false, true},
        {"entities", "tagger", "lexicon or pretagged:<path>", false, true},
        {"annotate", "max_depth", "maximum seed ontology depth", false, true},
        {"annotate", "balance_seed", "RNG seed for class balancing", false, true},
        {"scorer", "backend", "baseline, oracle or external:<path>[,<path>]", false, true},
        {"scorer", "truth", "planted ontology used by the oracle backend", true, true},
        {"aspects", "aspect_threshold", "accept an aspect when mean p1+p2 is above this", false, true},
        {"aspects", "product_threshold", "accept a product aspect when mean p2 is above this", false, true},
        {"aspects", "min_votes", "minimum scored sentences per entity", false, true},
        {"embedding", "dim", "vector dimension", false, true},
        {"embedding", "window", "CBOW context window", false, true},
        {"embedding", "negatives", "negative samples per prediction", false, true},
        {"embedding", "epochs", "training epochs", false, true},
        {"embedding", "min_count", "vocabulary frequency floor", false, true},
        {"embedding", "learning_rate", "initial learning rate", false, true},
        {"embedding", "subsample", "frequent-word subsampling rate (0 disables)", false, true},
        {"embedding", "deterministic", "single-threaded reproducible training", false, true},
        {"synsets", "rcs_n", "neighbourhood size of relative cosine similarity", false, true},
        {"synsets", "edge_threshold", "minimum edge weight in the synonym graph", false, true},
        {"synsets", "max_distance", "maximum hop distance inside a synset", false, true},
        {"synsets", "clusterer", "clustering backend", false, true},
        {"ontology", "product", "product name written to the ontology", false, true},
        {"run", "seed", "RNG seed for embeddings", false, true},
        {"run", "threads", "OpenMP threads (0: default)", false, false},
        {"run", "kernels", "kernel backend: openmp or serial", false, false},
    };
    return keys;
}

std::string ConfigKey::flag() const
{
    std::string f = "--" + section + "-" + key;
    std::replace(f.begin() + 2, f.end(), '_', '-');
    return f;
}

namespace {

using Slot = std::variant<std::string*, fs::path*, int*, std::uint64_t*, double*, bool*>;
static_assert(std::is_same_v<std::size_t, std::uint64_t>, "config slots assume a 64-bit size_t");

Slot slot(PipelineConfig& c, std::string_view key)
{
    static const auto table = [] {
        std::map<std::string, std::function<Slot(PipelineConfig&)>, std::less<>> m;
        m["paths.reviews"] = [](PipelineConfig& c) -> Slot { return &c.paths.reviews; };
        m["paths.seed"] = [](PipelineConfig& c) -> Slot { return &c.paths.seed; };
        m["paths.out_dir"] = [](PipelineConfig& c) -> Slot { return &c.paths.out_dir; };
        m["paths.judgments"] = [](PipelineConfig& c) -> Slot { return &c.paths.judgments; };
        m["paths.qa"] = [](PipelineConfig& c) -> Slot { return &c.paths.qa; };
        m["corpus.category"] = [](PipelineConfig& c) -> Slot { return &c.corpus.category; };
        m["corpus.field_map"] = [](PipelineConfig& c) -> Slot { return &c.corpus.field_map; };
        m["corpus.phrase_passes"] = [](PipelineConfig& c) -> Slot { return &c.corpus.phrase_passes; };
        m["corpus.phrase_min_count"] = [](PipelineConfig& c) -> Slot { return &c.corpus.phrase_min_count; };
        m["corpus.phrase_threshold"] = [](PipelineConfig& c) -> Slot { return &c.corpus.phrase_threshold; };
        m["entities.top_n"] = [](PipelineConfig& c) -> Slot { return &c.entities.top_n; };
        m["entities.tagger"] = [](PipelineConfig& c) -> Slot { return &c.entities.tagger; };
        m["annotate.max_depth"] = [](PipelineConfig& c) -> Slot { return &c.annotate.max_depth; };
        m["annotate.balance_seed"] = [](PipelineConfig& c) -> Slot { return &c.annotate.balance_seed; };
        m["scorer.backend"] = [](PipelineConfig& c) -> Slot { return &c.scorer.backend; };
        m["scorer.truth"] = [](PipelineConfig& c) -> Slot { return &c.scorer.truth; };
        m["aspects.aspect_threshold"] = [](PipelineConfig& c) -> Slot { return &c.aspects.aspect; };
        m["aspects.product_threshold"] = [](PipelineConfig& c) -> Slot { return &c.aspects.product; };
        m["aspects.min_votes"] = [](PipelineConfig& c) -> Slot { return &c.aspects.min_votes; };
        m["embedding.dim"] = [](PipelineConfig& c) -> Slot { return &c.embedding.dim; };
        m["embedding.window"] = [](PipelineConfig& c) -> Slot { return &c.embedding.window; };
        m["embedding.negatives"] = [](PipelineConfig& c) -> Slot { return &c.embedding.negatives; };
        m["embedding.epochs"] = [](PipelineConfig& c) -> Slot { return &c.embedding.epochs; };
        m["embedding.min_count"] = [](PipelineConfig& c) -> Slot { return &c.embedding.min_count; };
        m["embedding.learning_rate"] = [](PipelineConfig& c) -> Slot { return &c.embedding.learning_rate; };
        m["embedding.subsample"] = [](PipelineConfig& c) -> Slot { return &c.embedding.subsample; };
        m["embedding.deterministic"] = [](PipelineConfig& c) -> Slot { return &c.embedding.deterministic; };
        m["synsets.rcs_n"] = [](PipelineConfig& c) -> Slot { return &c.synsets.rcs_n; };
        m["synsets.edge_threshold"] = [](PipelineConfig& c) -> Slot { return &c.synsets.edge_threshold; };
        m["synsets.max_distance"] = [](PipelineConfig& c) -> Slot { return &c.synsets.max_distance; };
        m["synsets.clusterer"] = [](PipelineConfig& c) -> Slot { return &c.synsets.clusterer; };
        m["ontology.product"] = [](PipelineConfig& c) -> Slot { return &c.ontology.product; };
        m["run.seed"] = [](PipelineConfig& c) -> Slot { return &c.run.seed; };
        m["run.threads"] = [](PipelineConfig& c) -> Slot { return &c.run.threads; };
        m["run.kernels"] = [](PipelineConfig& c) -> Slot { return &c.run.kernels; };
        return m;
    }();
    auto it = table.find(key);
    if (it == table.end())
        throw UsageError("unknown config key '" + std::string(key) + "'");
    return it->second(c);
}

template <class T>
T parse_number(std::string_view key, const std::string& value)
{
    T out{};
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw UsageError("config key '" + std::string(key) + "' expects a number, got '" + value + "'");
    return out;
}

bool parse_bool(std::string_view key, const std::string& value)
{
    const auto v = ascii_lower(value);
    if (v == "true" || v == "yes" || v == "1" || v == "on")
        return true;
    if (v == "false" || v == "no" || v == "0" || v == "off")
        return false;
    throw UsageError("config key '" + std::string(key) + "' expects true or false, got '" + value + "'");
}

fs::path resolve(const fs::path& base, const fs::path& p)
{
    if (p.empty() || p.is_absolute())
        return p;
    return (base / p).lexically_normal();
}

std::vector<std::string> split_commas(const std::string& s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos)
            return out;
        start = comma + 1;
    }
}

std::string resolve_backend(const fs::path& base, const std::string& backend)
{
    if (!backend.starts_with("external:"))
        return backend;
    std::string out = "external:";
    bool first = true;
    for (const auto& p : split_commas(backend.substr(9))) {
        out += (first ? "" : ",") + resolve(base, p).string();
        first = false;
    }
    return out;
}

} // namespace

void PipelineConfig::set(std::string_view key, const std::string& value)
{
    std::visit(
        [&](auto* p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::string>)
                *p = value;
            else if constexpr (std::is_same_v<T, fs::path>)
                *p = value;
            else if constexpr (std::is_same_v<T, bool>)
                *p = parse_bool(key, value);
            else
                *p = parse_number<T>(key, value);
        },
        slot(*this, key));
}

std::string PipelineConfig::get(std::string_view key) const
{
    return std::visit(
        [](auto* p) -> std::string {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::string>)
                return *p;
            else if constexpr (std::is_same_v<T, fs::path>)
                return p->string();
            else if constexpr (std::is_same_v<T, bool>)
                return *p ? "true" : "false";
            else if constexpr (std::is_same_v<T, double>)
                return format_double(*p);
            else
                return std::to_string(*p);
        },
        slot(const_cast<PipelineConfig&>(*this), key));
}

PipelineConfig PipelineConfig::load(const fs::path& path)
{
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::BadFile&) {
        throw UsageError("cannot read config file " + path.string());
    } catch (const YAML::Exception& e) {
        throw UsageError("config " + path.string() + ": " + e.what());
    }
    PipelineConfig c;
    if (root.IsNull())
        return c;
    if (!root.IsMap())
        throw UsageError("config " + path.string() + ": top level must be a mapping of sections");
    const fs::path base = fs::absolute(path).parent_path();
    for (const auto& section : root) {
        const auto name = section.first.as<std::string>();
        if (!section.second.IsMap())
            throw UsageError("config section '" + name + "' must be a mapping");
        for (const auto& kv : section.second) {
            const std::string key = name + "." + kv.first.as<std::string>();
            if (!kv.second.IsScalar() && !kv.second.IsNull())
                throw UsageError("config key '" + key + "' must be a scalar");
            c.set(key, kv.second.IsNull() ? std::string() : kv.second.as<std::string>());
        }
    }
    for (const auto& k : config_keys()) {
        if (k.is_path)
            c.set(k.dotted(), resolve(base, c.get(k.dotted())).string());
    }
    c.scorer.backend = resolve_backend(base, c.scorer.backend);
    return c;
}

void PipelineConfig::validate() const
{
    auto fail = [](const std::string& key, const std::string& what) {
        throw UsageError("config key '" + key + "' " + what);
    };
    if (corpus.field_map != "native" && corpus.field_map != "amazon")
        fail("corpus.field_map", "must be native or amazon");
    if (corpus.phrase_passes < 1 || corpus.phrase_passes > 2)
        fail("corpus.phrase_passes", "must be 1 or 2");
    if (!(corpus.phrase_threshold > 0.0))
        fail("corpus.phrase_threshold", "must be positive");
    if (entities.top_n < 1)
        fail("entities.top_n", "must be at least 1");
    if (entities.tagger != "lexicon" && !entities.tagger.starts_with("pretagged:"))
        fail("entities.tagger", "must be lexicon or pretagged:<path>");
    if (annotate.max_depth < 1)
        fail("annotate.max_depth", "must be at least 1");
    if (scorer.backend != "baseline" && scorer.backend != "oracle" && !scorer.backend.starts_with("external:"))
        fail("scorer.backend", "must be baseline, oracle or external:<path>");
    if (scorer.backend == "external:")
        fail("scorer.backend", "names no score file");
    if (scorer.backend == "oracle" && scorer.truth.empty())
        fail("scorer.truth", "is required by the oracle backend");
    if (!(aspects.aspect >= 0.0 && aspects.aspect <= 1.0))
        fail("aspects.aspect_threshold", "must lie in [0, 1]");
    if (!(aspects.product >= 0.0 && aspects.product <= 1.0))
        fail("aspects.product_threshold", "must lie in [0, 1]");
    if (aspects.min_votes < 1)
        fail("aspects.min_votes", "must be at least 1");
    if (embedding.dim < 8)
        fail("embedding.dim", "must be at least 8");
    if (embedding.window < 1)
        fail("embedding.window", "must be at least 1");
    if (embedding.negatives < 1)
        fail("embedding.negatives", "must be at least 1");
    if (embedding.epochs < 1)
        fail("embedding.epochs", "must be at least 1");
    if (!(embedding.learning_rate > 0.0 && embedding.learning_rate <= 1.0))
        fail("embedding.learning_rate", "must lie in (0, 1]");
    if (!(embedding.subsample >= 0.0))
        fail("embedding.subsample", "must not be negative");
    if (synsets.rcs_n < 1)
        fail("synsets.rcs_n", "must be at least 1");
    if (!(synsets.edge_threshold >= 0.0 && synsets.edge_threshold <= 2.0))
        fail("synsets.edge_threshold", "must lie in [0, 2]");
    if (synsets.max_distance < 1)
        fail("synsets.max_distance", "must be at least 1");
    make_clusterer(synsets.clusterer);
    if (run.threads < 0)
        fail("run.threads", "must not be negative");
    if (run.kernels != "openmp" && run.kernels != "serial")
        fail("run.kernels", "must be openmp or serial");
    if (paths.out_dir.empty())
        fail("paths.out_dir", "must not be empty");
}

std::string PipelineConfig::canonical() const
{
    std::string out;
    for (const auto& k : config_keys()) {
        if (k.hashed)
            out += k.dotted() + "=" + get(k.dotted()) + "\n";
    }
    return out;
}

std::string PipelineConfig::hash() const
{
    return to_hex(fnv1a64(canonical()));
}

std::string PipelineConfig::to_yaml() const
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    std::string section;
    for (const auto& k : config_keys()) {
        if (k.section != section) {
            if (!section.empty())
                out << YAML::EndMap;
            section = k.section;
            out << YAML::Key << section << YAML::Value << YAML::BeginMap;
        }
        out << YAML::Key << k.key << YAML::Value << YAML::DoubleQuoted << get(k.dotted());
    }
    out << YAML::EndMap << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

kernels::Backend PipelineConfig::kernel_backend() const
{
    return run.kernels == "serial" ? kernels::Backend::serial : kernels::Backend::openmp;
}

// ---------------------------------------------------------------------------
// Stages

const char* stage_name(Stage s)
{
    switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::entities: return "entities";
    case Stage::annotate: return "annotate";
    case Stage::score: return "score";
    case Stage::aspects: return "aspects";
    case Stage::embed: return "embed";
    case Stage::synsets: return "synsets";
    case Stage::ontology: return "ontology";
    case Stage::evaluate: return "evaluate";
    case Stage::qa_eval: return "qa-eval";
    }
    return "?";
}

std::vector<Stage> all_stages()
{
    return {Stage::ingest, Stage::entities, Stage::annotate, Stage::score,    Stage::aspects,
            Stage::embed,  Stage::synsets,  Stage::ontology, Stage::evaluate, Stage::qa_eval};
}

Stage stage_from_name(std::string_view name)
{
    for (auto s : all_stages()) {
        if (name == stage_name(s))
            return s;
    }
    throw UsageError("unknown stage '" + std::string(name) + "'");
}

namespace {

constexpr int kArtifactVersion = 1;

struct Requirement {
    Stage producer;
    const char* artifact;
};

std::vector<Requirement> requirements(Stage stage, const PipelineConfig& c)
{
    const bool baseline = c.scorer.backend == "baseline";
    switch (stage) {
    case Stage::ingest:
    case Stage::evaluate:
        return {};
    case Stage::entities:
        return {{Stage::ingest, "sentences.jsonl"}};
    case Stage::annotate:
        return {{Stage::ingest, "sentences.jsonl"}, {Stage::entities, "entities.json"}};
    case Stage::score:
        if (baseline)
            return {{Stage::entities, "aspect_inputs.jsonl"},
                    {Stage::annotate, "aspect_train.jsonl"},
                    {Stage::annotate, "relation_train.jsonl"}};
        return {{Stage::entities, "aspect_inputs.jsonl"}};
    case Stage::aspects:
        return {{Stage::score, "aspect_scores.jsonl"}};
    case Stage::embed:
        return {{Stage::ingest, "sentences.jsonl"}, {Stage::aspects, "aspects.json"}};
    case Stage::synsets:
        return {{Stage::ingest, "sentences.jsonl"}, {Stage::aspects, "aspects.json"}, {Stage::embed, "embeddings.txt"}};
    case Stage::ontology:
        if (baseline)
            return {{Stage::score, "baseline_model.json"},
                    {Stage::synsets, "synsets.json"},
                    {Stage::synsets, "relation_inputs.jsonl"}};
        return {{Stage::synsets, "synsets.json"}, {Stage::synsets, "relation_inputs.jsonl"}};
    case Stage::qa_eval:
        return {{Stage::ontology, "ontology.json"}};
    }
    return {};
}

nlohmann::json meta(const std::string& hash, Stage stage, const char* format)
{
    return {{"_meta", {{"format", format}, {"version", kArtifactVersion}, {"stage", stage_name(stage)}, {"config_hash", hash}}}};
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + p.string());
    return out;
}

void write_json(const fs::path& p, const nlohmann::json& j)
{
    auto out = open_out(p);
    out << j.dump(2) << '\n';
    if (!out)
        throw DataError("failed writing " + p.string());
}

template <class Rows, class ToJson>
void write_jsonl(const fs::path& p, const nlohmann::json& header, const Rows& rows, ToJson to_json)
{
    auto out = open_out(p);
    out << header.dump() << '\n';
    for (const auto& r : rows)
        out << to_json(r).dump() << '\n';
    if (!out)
        throw DataError("failed writing " + p.string());
}

} // namespace

Pipeline::Pipeline(PipelineConfig config, RunOptions options) : config_(std::move(config)), options_(options)
{
    config_.validate();
    hash_ = config_.hash();
    if (config_.run.threads > 0)
        omp_set_num_threads(config_.run.threads);
}

fs::path Pipeline::artifact(std::string_view name) const
{
    return config_.paths.out_dir / std::string(name);
}

void Pipeline::log(Stage stage, const std::string& message) const
{
    if (options_.log)
        *options_.log << "[" << stage_name(stage) << "] " << message << '\n';
}

void Pipeline::check_inputs(Stage stage) const
{
    auto need = [](const fs::path& p, const char* key) {
        if (p.empty())
            throw UsageError("config key '" + std::string(key) + "' must be set for this stage");
    };
    switch (stage) {
    case Stage::ingest: need(config_.paths.reviews, "paths.reviews"); break;
    case Stage::annotate: need(config_.paths.seed, "paths.seed"); break;
    case Stage::evaluate: need(config_.paths.judgments, "paths.judgments"); break;
    case Stage::qa_eval: need(config_.paths.qa, "paths.qa"); break;
    default: break;
    }

    std::optional<Requirement> earliest;
    for (const auto& r : requirements(stage, config_)) {
        if (fs::exists(artifact(r.artifact)))
            continue;
        if (!earliest || r.producer < earliest->producer)
            earliest = r;
    }
    if (earliest)
        throw StageDependencyError(earliest->producer, std::string("stage '") + stage_name(stage) + "' needs " +
                                                           artifact(earliest->artifact).string() +
                                                           "; run stage '" + stage_name(earliest->producer) +
                                                           "' first");
}

namespace {

class ArtifactReader {
public:
    ArtifactReader(std::string hash, bool force) : hash_(std::move(hash)), force_(force) {}

    void check_hash(const fs::path& p, const std::string& found) const
    {
        if (found == hash_ || force_)
            return;
        throw UsageError(p.string() + " was written under config " + found + ", current config is " + hash_ +
                         "; rerun the producing stage or pass --force");
    }

    nlohmann::json json(const fs::path& p) const
    {
        std::ifstream in(p);
        if (!in)
            throw DataError("cannot open " + p.string());
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw DataError(p.string() + ": not a JSON object");
        check_hash(p, j.value("config_hash", ""));
        return j;
    }

    template <class F>
    void jsonl(const fs::path& p, F on_row) const
    {
        std::ifstream in(p);
        if (!in)
            throw DataError("cannot open " + p.string());
        std::string line;
        std::size_t line_no = 0;
        bool saw_meta = false;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object())
                throw DataError(p.string() + ":" + std::to_string(line_no) + ": not a JSON object");
            if (j.contains("_meta")) {
                check_hash(p, j["_meta"].value("config_hash", ""));
                saw_meta = true;
                continue;
            }
            if (!saw_meta)
                check_hash(p, "");
            try {
                on_row(j);
            } catch (const DataError& e) {
                throw DataError(p.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
    }

private:
    std::string hash_;
    bool force_;
};

std::vector<ReviewSentence> read_sentences(const ArtifactReader& reader, const fs::path& p)
{
    std::vector<ReviewSentence> out;
    reader.jsonl(p, [&](const nlohmann::json& j) { out.push_back(sentence_from_json(j)); });
    return out;
}

std::vector<LabeledExample> read_examples(const ArtifactReader& reader, const fs::path& p)
{
    std::vector<LabeledExample> out;
    reader.jsonl(p, [&](const nlohmann::json& j) { out.push_back(example_from_json(j)); });
    return out;
}

std::vector<ScoreRecord> read_records(const ArtifactReader& reader, const fs::path& p)
{
    std::vector<ScoreRecord> out;
    reader.jsonl(p, [&](const nlohmann::json& j) { out.push_back(record_from_json(j)); });
    return out;
}

std::string histogram_text(const std::array<std::size_t, 3>& h)
{
    return std::to_string(h[0]) + "/" + std::to_string(h[1]) + "/" + std::to_string(h[2]);
}

} // namespace

void Pipeline::run(Stage stage)
{
    check_inputs(stage);
    fs::create_directories(config_.paths.out_dir);
    switch (stage) {
    case Stage::ingest: ingest(); break;
    case Stage::entities: entities(); break;
    case Stage::annotate: annotate(); break;
    case Stage::score: score(); break;
    case Stage::aspects: aspects(); break;
    case Stage::embed: embed(); break;
    case Stage::synsets: synsets(); break;
    case Stage::ontology: ontology(); break;
    case Stage::evaluate: evaluate(); break;
    case Stage::qa_eval: qa_eval(); break;
    }
}

void Pipeline::run_all()
{
    if (config_.paths.reviews.empty())
        throw UsageError("config key 'paths.reviews' must be set for this stage");
    if (config_.paths.seed.empty())
        throw UsageError("config key 'paths.seed' must be set for this stage");
    for (auto s : all_stages()) {
        if (s == Stage::evaluate && config_.paths.judgments.empty())
            continue;
        if (s == Stage::qa_eval && config_.paths.qa.empty())
            continue;
        run(s);
    }
}

std::unique_ptr<Scorer> Pipeline::make_scorer() const
{
    const auto& b = config_.scorer.backend;
    if (b == "oracle")
        return std::make_unique<OracleScorer>(SeedOntology::load(config_.scorer.truth, 64));
    if (b.starts_with("external:")) {
        ScoreIndex index;
        for (const auto& p : split_commas(b.substr(9))) {
            if (!p.empty())
                load_external_scores(p, index);
        }
        return std::make_unique<ExternalScorer>(std::move(index));
    }
    ArtifactReader reader(hash_, options_.force);
    const auto model = artifact("baseline_model.json");
    if (!fs::exists(model))
        throw StageDependencyError(Stage::score, "baseline model " + model.string() + " is missing; run stage 'score' first");
    return std::make_unique<BaselineScorer>(BaselineScorer::from_json(reader.json(model).at("model")));
}

void Pipeline::ingest()
{
    const auto fields = config_.corpus.field_map == "amazon" ? ReviewFieldMap::amazon() : ReviewFieldMap{};
    std::optional<std::string> category;
    if (!config_.corpus.category.empty())
        category = config_.corpus.category;
    const auto loaded = load_reviews(config_.paths.reviews, category, fields);
    log(Stage::ingest, std::to_string(loaded.reviews.size()) + " reviews, " + std::to_string(loaded.warnings) +
                           " skipped line(s)");

    std::vector<ReviewSentence> sentences;
    for (const auto& r : loaded.reviews) {
        auto part = split_and_tokenize(r);
        sentences.insert(sentences.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    if (sentences.empty())
        throw DataError("the review file yields no sentences");

    PhraseOptions po;
    po.passes = config_.corpus.phrase_passes;
    po.min_count = config_.corpus.phrase_min_count;
    po.threshold = config_.corpus.phrase_threshold;
    const auto model = learn_phrases(sentences, po);

    std::vector<ReviewSentence> phrased(sentences.size());
    const auto n = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        phrased[static_cast<std::size_t>(i)] = apply_phrases(model, sentences[static_cast<std::size_t>(i)]);

    write_jsonl(artifact("sentences.jsonl"), meta(hash_, Stage::ingest, "meronomy.sentences"), phrased,
                sentence_to_json);
    auto pj = model.to_json();
    pj["config_hash"] = hash_;
    write_json(artifact("phrases.json"), pj);
    log(Stage::ingest, std::to_string(phrased.size()) + " sentences");
}

void Pipeline::entities()
{
    ArtifactReader reader(hash_, options_.force);
    const auto sentences = read_sentences(reader, artifact("sentences.jsonl"));
    const auto tagger = make_tagger(config_.entities.tagger);
    std::size_t warnings = 0;
    const auto top = top_entities(sentences, *tagger, config_.entities.top_n, config_.kernel_backend(), &warnings);
    if (warnings)
        log(Stage::entities, std::to_string(warnings) + " sentence(s) could not be tagged");
    write_json(artifact("entities.json"), {{"format", "meronomy.entities"},
                                           {"version", kArtifactVersion},
                                           {"config_hash", hash_},
                                           {"entities", entities_to_json(top)}});

    std::unordered_set<std::string> frequent;
    for (const auto& e : top)
        frequent.insert(e.entity);
    const auto inputs = select_aspect_inputs(sentences, frequent);
    write_jsonl(artifact("aspect_inputs.jsonl"), meta(hash_, Stage::entities, "meronomy.examples"), inputs,
                example_to_json);
    log(Stage::entities, std::to_string(top.size()) + " entities, " + std::to_string(inputs.size()) +
                             " aspect inputs");
}

void Pipeline::annotate()
{
    ArtifactReader reader(hash_, options_.force);
    const auto seed = SeedOntology::load(config_.paths.seed, config_.annotate.max_depth);
    const auto sentences = read_sentences(reader, artifact("sentences.jsonl"));
    std::vector<std::string> frequent;
    for (const auto& e : entities_from_json(reader.json(artifact("entities.json")).at("entities")))
        frequent.push_back(e.entity);

    const auto aspect = generate_aspect_examples(sentences, seed, frequent);
    const auto relation = generate_relation_examples(sentences, seed);
    log(Stage::annotate, "aspect labels " + histogram_text(label_histogram(aspect)) + ", relation labels " +
                             histogram_text(label_histogram(relation)));
    const auto aspect_bal = balance_classes(aspect, config_.annotate.balance_seed);
    const auto relation_bal = balance_classes(relation, config_.annotate.balance_seed);
    write_jsonl(artifact("aspect_train.jsonl"), meta(hash_, Stage::annotate, "meronomy.examples"), aspect_bal,
                example_to_json);
    write_jsonl(artifact("relation_train.jsonl"), meta(hash_, Stage::annotate, "meronomy.examples"), relation_bal,
                example_to_json);
    log(Stage::annotate, std::to_string(aspect_bal.size()) + " aspect and " + std::to_string(relation_bal.size()) +
                             " relation training examples after balancing");
}

void Pipeline::score()
{
    ArtifactReader reader(hash_, options_.force);
    if (config_.scorer.backend == "baseline") {
        const auto aspect = read_examples(reader, artifact("aspect_train.jsonl"));
        const auto relation = read_examples(reader, artifact("relation_train.jsonl"));
        const auto model = BaselineScorer::train(aspect, relation);
        write_json(artifact("baseline_model.json"), {{"format", "meronomy.baseline_model"},
                                                     {"version", kArtifactVersion},
                                                     {"config_hash", hash_},
                                                     {"model", model.to_json()}});
    }
    const auto scorer = make_scorer();
    const auto inputs = read_examples(reader, artifact("aspect_inputs.jsonl"));
    const auto records = score_examples(*scorer, inputs);
    write_jsonl(artifact("aspect_scores.jsonl"), meta(hash_, Stage::score, "meronomy.scores"), records,
                record_to_json);
    log(Stage::score, std::to_string(records.size()) + " aspect inputs scored by " + scorer->name());
}

void Pipeline::aspects()
{
    ArtifactReader reader(hash_, options_.force);
    const auto records = read_records(reader, artifact("aspect_scores.jsonl"));
    const auto result = aggregate_aspect_votes(group_aspect_votes(records), config_.aspects);
    for (const auto& w : result.warnings)
        log(Stage::aspects, "warning: " + w);
    write_json(artifact("aspects.json"), {{"format", "meronomy.aspects"},
                                          {"version", kArtifactVersion},
                                          {"config_hash", hash_},
                                          {"decisions", decisions_to_json(result.decisions)},
                                          {"warnings", result.warnings}});
    log(Stage::aspects, std::to_string(feature_aspects(result.decisions).size()) + " feature and " +
                            std::to_string(product_aspects(result.decisions).size()) + " product aspects");
}

void Pipeline::embed()
{
    ArtifactReader reader(hash_, options_.force);
    const auto sentences = read_sentences(reader, artifact("sentences.jsonl"));
    const auto decisions = decisions_from_json(reader.json(artifact("aspects.json")).at("decisions"));
    std::vector<std::string> keep;
    for (const auto& d : decisions) {
        if (d.is_aspect)
            keep.push_back(d.entity);
    }
    CbowOptions options = config_.embedding;
    options.seed = config_.run.seed;
    auto table = train_cbow(sentences, options, keep);
    table.fingerprint = hash_;
    table.save(artifact("embeddings.txt"));
    std::string losses;
    for (double l : table.epoch_loss)
        losses += (losses.empty() ? "" : " ") + format_double(l);
    log(Stage::embed, std::to_string(table.size()) + " words, loss per epoch: " + losses);
}

void Pipeline::synsets()
{
    ArtifactReader reader(hash_, options_.force);
    const auto table = EmbeddingTable::load(artifact("embeddings.txt"));
    reader.check_hash(artifact("embeddings.txt"), table.fingerprint);
    const auto decisions = decisions_from_json(reader.json(artifact("aspects.json")).at("decisions"));
    const auto sentences = read_sentences(reader, artifact("sentences.jsonl"));

    const auto features = feature_aspects(decisions);
    const auto products = product_aspects(decisions);
    SimilarityIndex index(table, config_.synsets.rcs_n, config_.kernel_backend());
    const auto graph = build_synonym_graph(index, features, config_.synsets.edge_threshold);
    const auto clusterer = make_clusterer(config_.synsets.clusterer);
    const auto clusters = clusterer->cluster(graph, config_.synsets.max_distance);
    const auto counts = token_counts(sentences);
    const auto synsets = assemble_synsets(graph, clusters, products, counts);

    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : graph.edges)
        edges.push_back({{"a", graph.terms[e.a]}, {"b", graph.terms[e.b]}, {"weight", e.weight}});
    nlohmann::json term_counts = nlohmann::json::object();
    for (const auto& s : synsets) {
        for (const auto& t : s.terms)
            term_counts[t] = counts.count(t) ? counts.at(t) : 0;
    }
    write_json(artifact("synsets.json"), {{"format", "meronomy.synsets"},
                                          {"version", kArtifactVersion},
                                          {"config_hash", hash_},
                                          {"clusterer", clusterer->name()},
                                          {"synsets", synsets_to_json(synsets)},
                                          {"term_counts", term_counts},
                                          {"edges", edges}});

    const auto inputs = select_relation_inputs(sentences, synset_index(synsets));
    write_jsonl(artifact("relation_inputs.jsonl"), meta(hash_, Stage::synsets, "meronomy.examples"), inputs,
                example_to_json);
    log(Stage::synsets, std::to_string(synsets.size()) + " synsets from " + std::to_string(graph.edges.size()) +
                            " graph edges, " + std::to_string(inputs.size()) + " relation inputs");
}

void Pipeline::ontology()
{
    ArtifactReader reader(hash_, options_.force);
    const auto sj = reader.json(artifact("synsets.json"));
    const auto synsets = synsets_from_json(sj.at("synsets"));
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& [term, c] : sj.at("term_counts").items())
        counts[term] = c.get<std::uint64_t>();

    const auto scorer = make_scorer();
    const auto inputs = read_examples(reader, artifact("relation_inputs.jsonl"));
    const auto records = score_examples(*scorer, inputs);
    write_jsonl(artifact("relation_scores.jsonl"), meta(hash_, Stage::ontology, "meronomy.scores"), records,
                record_to_json);

    std::vector<std::uint64_t> c;
    for (const auto& s : synsets)
        c.push_back(s.c);
    const auto votes = pair_votes(records, synset_index(synsets));
    const auto vm = accumulate_votes(votes, c, config_.kernel_backend());
    const auto R = relation_matrix(vm);
    auto rj = relation_matrix_to_json(vm, R);
    rj["config_hash"] = hash_;
    rj["format"] = "meronomy.relation_matrix";
    rj["version"] = kArtifactVersion;
    write_json(artifact("relation_matrix.json"), rj);

    const auto tree = build_tree(R, 0);
    std::string product = config_.ontology.product;
    if (product.empty() && !config_.paths.seed.empty() && fs::exists(config_.paths.seed)) {
        const auto seed = SeedOntology::load(config_.paths.seed, config_.annotate.max_depth);
        if (seed.product_count() == 1)
            product = seed.product_name(0);
    }
    if (product.empty())
        product = synsets.front().terms.front();
    const auto onto = assemble_ontology(product, synsets, tree, counts, hash_);
    write_json(artifact("ontology.json"), onto.to_json());
    log(Stage::ontology, std::to_string(records.size()) + " relation inputs scored, " +
                             std::to_string(onto.nodes.size()) + " ontology nodes");
}

void Pipeline::evaluate()
{
    const auto judgments = load_judgments_csv(config_.paths.judgments);
    const auto report = evaluate_judgments(judgments);
    write_json(artifact("evaluation.json"), report.to_json());
    auto out = open_out(artifact("evaluation.txt"));
    out << report.to_text();
    log(Stage::evaluate, "\n" + report.to_text());
}

void Pipeline::qa_eval()
{
    ArtifactReader reader(hash_, options_.force);
    const auto onto = Ontology::from_json(reader.json(artifact("ontology.json")));
    const auto instances = load_qa_jsonl(config_.paths.qa);
    const auto result = meronomy::qa_eval(onto, instances);
    write_json(artifact("qa_eval.json"), result.to_json());
    log(Stage::qa_eval, "p_a " + format_double(result.p_a) + ", p_r " + format_double(result.p_r) + " over " +
                            std::to_string(result.instances) + " instances");
}

} // namespace meronomy
