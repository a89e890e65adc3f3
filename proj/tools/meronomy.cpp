// Command-line driver: one subcommand per pipeline stage, plus `all` and the
// planted-corpus generator `synth`.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "meronomy/annotator.hpp"
#include "meronomy/common.hpp"
#include "meronomy/pipeline.hpp"
#include "meronomy/scorer.hpp"
#include "meronomy/synthetic.hpp"
#include "meronomy/tagger.hpp"

namespace {

using namespace meronomy;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

PipelineConfig fixture_config()
{
    PipelineConfig c;
    c.paths.reviews = "reviews.jsonl";
    c.paths.seed = "seed.json";
    c.paths.qa = "qa.jsonl";
    c.paths.out_dir = "out";
    c.scorer.backend = "oracle";
    c.scorer.truth = "truth.json";
    return c;
}

int run(int argc, char** argv)
{
    CLI::App app{"Product meronomy extraction from review text"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    bool force = false;
    bool quiet = false;
    app.add_option("-c,--config", config_path, "YAML config file")->check(CLI::ExistingFile);
    app.add_flag("--force", force, "accept artifacts written under a different config");
    app.add_flag("-q,--quiet", quiet, "suppress progress messages");

    std::map<std::string, std::optional<std::string>> overrides;
    for (const auto& k : config_keys())
        app.add_option(k.flag(), overrides[k.dotted()], k.help)->group("Config overrides");

    std::vector<std::pair<CLI::App*, std::optional<Stage>>> stages;
    for (auto s : all_stages())
        stages.emplace_back(app.add_subcommand(stage_name(s), std::string("run the ") + stage_name(s) + " stage"),
                            s);
    auto* all = app.add_subcommand("all", "run every stage in order");
    auto* print_config = app.add_subcommand("config", "print the effective config and its hash");

    auto* synth = app.add_subcommand("synth", "write a planted-ontology fixture corpus with a matching config");
    std::string synth_dir;
    SyntheticOptions synth_options;
    synth->add_option("--out", synth_dir, "fixture directory")->required();
    synth->add_option("--sentences", synth_options.sentences, "number of sentences")->capture_default_str();
    synth->add_option("--seed", synth_options.seed, "generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (synth->parsed()) {
        const auto corpus = generate_planted_corpus(synth_options);
        write_planted_corpus(corpus, synth_dir);
        std::ofstream(std::filesystem::path(synth_dir) / "config.yaml") << fixture_config().to_yaml();
        if (!quiet)
            std::clog << "wrote " << corpus.sentence_count << " sentences in " << corpus.reviews.size()
                      << " reviews to " << synth_dir << '\n';
        return 0;
    }

    PipelineConfig config = config_path.empty() ? PipelineConfig{} : PipelineConfig::load(config_path);
    if (const char* env = std::getenv("MERONOMY_OUT_DIR"); env && *env)
        config.paths.out_dir = env;
    for (const auto& [key, value] : overrides) {
        if (value)
            config.set(key, *value);
    }

    if (print_config->parsed()) {
        config.validate();
        std::cout << "# config hash " << config.hash() << '\n' << config.to_yaml();
        return 0;
    }

    RunOptions options;
    options.force = force;
    options.log = quiet ? nullptr : &std::clog;
    Pipeline pipeline(std::move(config), options);
    if (all->parsed()) {
        pipeline.run_all();
        return 0;
    }
    for (const auto& [sub, stage] : stages) {
        if (sub->parsed())
            pipeline.run(*stage);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ScorerError& e) {
        std::cerr << "scorer error" << (e.transient() ? " (transient)" : "") << ": " << e.what() << '\n';
        return kExitData;
    } catch (const TaggerError& e) {
        std::cerr << "tagger error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
