// Serial vs OpenMP kernels on synthetic inputs.
//   bench_kernels --benchmark_filter=Ngrams

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "meronomy/corpus.hpp"
#include "meronomy/kernels.hpp"
#include "meronomy/synthetic.hpp"
#include "meronomy/tagger.hpp"

using namespace meronomy;
using kernels::Backend;

namespace {

const std::vector<ReviewSentence>& corpus()
{
    static const auto sentences = [] {
        SyntheticOptions opts;
        opts.sentences = 50000;
        std::vector<ReviewSentence> out;
        for (const auto& r : generate_planted_corpus(opts).reviews) {
            auto s = split_and_tokenize(r);
            out.insert(out.end(), s.begin(), s.end());
        }
        return out;
    }();
    return sentences;
}

std::vector<double> unit_rows(std::size_t rows, std::size_t dim)
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<double> v(rows * dim);
    for (std::size_t r = 0; r < rows; ++r) {
        double norm = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            v[r * dim + k] = g(rng);
            norm += v[r * dim + k] * v[r * dim + k];
        }
        for (std::size_t k = 0; k < dim; ++k)
            v[r * dim + k] /= std::sqrt(norm);
    }
    return v;
}

Backend backend_arg(const benchmark::State& state)
{
    return state.range(0) ? Backend::openmp : Backend::serial;
}

void BM_Ngrams(benchmark::State& state)
{
    const auto& s = corpus();
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::count_ngrams(s, backend_arg(state)));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s.size()));
}

void BM_Nouns(benchmark::State& state)
{
    const auto& s = corpus();
    LexiconTagger tagger;
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::count_nouns(s, tagger, backend_arg(state)));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s.size()));
}

void BM_TopSimilarity(benchmark::State& state)
{
    const std::size_t rows = 5000;
    const std::size_t dim = 100;
    static const auto data = unit_rows(rows, dim);
    kernels::UnitVectors uv{data, rows, dim};
    std::vector<std::size_t> queries(200);
    for (std::size_t i = 0; i < queries.size(); ++i)
        queries[i] = i * (rows / queries.size());
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::top_similarity_sums(uv, queries, 10, backend_arg(state)));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * queries.size()));
}

void BM_Votes(benchmark::State& state)
{
    const std::size_t n = 60;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<kernels::PairVote> votes;
    while (votes.size() < 500000) {
        auto i = static_cast<std::uint32_t>(rng() % n);
        auto j = static_cast<std::uint32_t>(rng() % n);
        if (i != j) {
            const double p1 = u(rng);
            votes.push_back({i, j, p1, (1.0 - p1) * u(rng)});
        }
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::accumulate_votes(votes, n, backend_arg(state)));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * votes.size()));
}

} // namespace

BENCHMARK(BM_Ngrams)->ArgName("openmp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Nouns)->ArgName("openmp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TopSimilarity)->ArgName("openmp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Votes)->ArgName("openmp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
