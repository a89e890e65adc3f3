#include <doctest.h>

#include <sstream>

#include "meronomy/ontology.hpp"
#include "meronomy/pipeline.hpp"
#include "meronomy/synthetic.hpp"
#include "test_util.hpp"

using namespace meronomy;

namespace {

PipelineConfig small_config(const std::filesystem::path& dir)
{
    SyntheticOptions opts;
    opts.sentences = 1500;
    opts.qa_instances = 40;
    write_planted_corpus(generate_planted_corpus(opts), dir);
    PipelineConfig c;
    c.paths.reviews = dir / "reviews.jsonl";
    c.paths.seed = dir / "seed.json";
    c.paths.qa = dir / "qa.jsonl";
    c.paths.out_dir = dir / "out";
    c.scorer.backend = "oracle";
    c.scorer.truth = dir / "truth.json";
    c.embedding.dim = 24;
    c.embedding.epochs = 2;
    return c;
}

} // namespace

TEST_CASE("config keys parse, validate and reject unknown names")
{
    PipelineConfig c;
    c.set("synsets.edge_threshold", "0.3");
    CHECK(c.synsets.edge_threshold == 0.3);
    CHECK(c.get("synsets.edge_threshold") == "0.3");
    c.set("embedding.deterministic", "no");
    CHECK_FALSE(c.embedding.deterministic);
    CHECK_THROWS_AS(c.set("synsets.nope", "1"), UsageError);
    CHECK_THROWS_AS(c.set("embedding.dim", "abc"), UsageError);
    CHECK_THROWS_AS(c.set("embedding.deterministic", "maybe"), UsageError);

    c.embedding.dim = 4;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c = PipelineConfig{};
    c.scorer.backend = "oracle";
    CHECK_THROWS_AS(c.validate(), UsageError);
    c.scorer.backend = "gpu";
    CHECK_THROWS_AS(c.validate(), UsageError);

    for (const auto& k : config_keys())
        CHECK_NOTHROW(PipelineConfig{}.get(k.dotted()));
    CHECK(config_keys().front().flag().starts_with("--"));
}

TEST_CASE("config hash ignores output location and thread count only")
{
    PipelineConfig a;
    PipelineConfig b;
    b.paths.out_dir = "elsewhere";
    b.run.threads = 3;
    b.run.kernels = "serial";
    b.paths.qa = "qa.jsonl";
    b.paths.judgments = "j.csv";
    CHECK(a.hash() == b.hash());
    b.synsets.edge_threshold = 0.25;
    CHECK(a.hash() != b.hash());
    PipelineConfig d;
    d.run.seed = 2;
    CHECK(a.hash() != d.hash());
}

TEST_CASE("config files resolve relative paths and round-trip through yaml")
{
    testutil::TempDir dir("cfg");
    testutil::write_file(dir / "c.yaml", "paths:\n  reviews: data/r.jsonl\n  out_dir: out\n"
                                         "scorer:\n  backend: external:s1.jsonl,s2.jsonl\n"
                                         "synsets:\n  edge_threshold: 0.25\n");
    auto c = PipelineConfig::load(dir / "c.yaml");
    CHECK(c.paths.reviews == (dir / "data/r.jsonl").lexically_normal());
    CHECK(c.synsets.edge_threshold == 0.25);
    CHECK(c.scorer.backend == "external:" + (dir / "s1.jsonl").string() + "," + (dir / "s2.jsonl").string());

    testutil::write_file(dir / "again.yaml", c.to_yaml());
    auto again = PipelineConfig::load(dir / "again.yaml");
    CHECK(again.hash() == c.hash());

    testutil::write_file(dir / "bad.yaml", "synsets:\n  nonsense: 1\n");
    CHECK_THROWS_AS(PipelineConfig::load(dir / "bad.yaml"), UsageError);
    CHECK_THROWS_AS(PipelineConfig::load(dir / "missing.yaml"), UsageError);
}

TEST_CASE("stage names")
{
    for (auto s : all_stages())
        CHECK(stage_from_name(stage_name(s)) == s);
    CHECK(stage_from_name("qa-eval") == Stage::qa_eval);
    CHECK_THROWS_AS(stage_from_name("train"), UsageError);
}

TEST_CASE("running a stage early names the missing producer")
{
    testutil::TempDir dir("order");
    auto config = small_config(dir.path());
    Pipeline p(config);
    try {
        p.run(Stage::ontology);
        FAIL("expected a stage dependency error");
    } catch (const StageDependencyError& e) {
        CHECK(e.missing() == Stage::synsets);
    }
    p.run(Stage::ingest);
    try {
        p.run(Stage::annotate);
        FAIL("expected a stage dependency error");
    } catch (const StageDependencyError& e) {
        CHECK(e.missing() == Stage::entities);
    }
}

TEST_CASE("artifacts from another config are refused unless forced")
{
    testutil::TempDir dir("hash");
    auto config = small_config(dir.path());
    Pipeline(config).run(Stage::ingest);
    auto changed = config;
    changed.entities.top_n = 150;
    CHECK_THROWS_AS(Pipeline(changed).run(Stage::entities), UsageError);
    CHECK_NOTHROW(Pipeline(changed, RunOptions{.force = true}).run(Stage::entities));
}

TEST_CASE("full run is deterministic and backend independent")
{
    testutil::TempDir dir("det");
    auto config = small_config(dir.path());
    std::ostringstream log;
    Pipeline(config, RunOptions{.log = &log}).run_all();
    CHECK(log.str().find("ontology") != std::string::npos);
    const auto first = testutil::read_file(config.paths.out_dir / "ontology.json");
    REQUIRE_FALSE(first.empty());
    CHECK(std::filesystem::exists(config.paths.out_dir / "qa_eval.json"));

    auto serial = config;
    serial.paths.out_dir = dir / "out_serial";
    serial.run.kernels = "serial";
    Pipeline(serial).run_all();
    CHECK(testutil::read_file(serial.paths.out_dir / "ontology.json") == first);

    auto o = Ontology::from_json(nlohmann::json::parse(first));
    CHECK(o.config_hash == config.hash());
    CHECK(o.product == "television");
}
