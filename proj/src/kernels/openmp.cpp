#include <omp.h>

#include <stdexcept>

#include "impl.hpp"
#include "meronomy/corpus.hpp"
#include "meronomy/tagger.hpp"

namespace meronomy::kernels::omp {

namespace {

template <typename Map>
void merge_into(Map& dst, Map& src)
{
    if (dst.empty()) {
        dst.swap(src);
        return;
    }
    for (auto& [k, v] : src)
        dst[k] += v;
}

} // namespace

NgramCounts count_ngrams(std::span<const ReviewSentence> sentences)
{
    const auto n = static_cast<std::ptrdiff_t>(sentences.size());
    std::vector<NgramCounts> partial(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
    {
        NgramCounts& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (std::ptrdiff_t si = 0; si < n; ++si) {
            const auto& tokens = sentences[static_cast<std::size_t>(si)].tokens;
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                ++local.unigrams[tokens[i]];
                ++local.total;
                if (i + 1 < tokens.size())
                    ++local.pairs[tokens[i] + " " + tokens[i + 1]];
            }
        }
    }
    NgramCounts out;
    for (auto& p : partial) {
        merge_into(out.unigrams, p.unigrams);
        merge_into(out.pairs, p.pairs);
        out.total += p.total;
    }
    return out;
}

NounCounts count_nouns(std::span<const ReviewSentence> sentences, const PosTagger& tagger)
{
    const auto n = static_cast<std::ptrdiff_t>(sentences.size());
    std::vector<NounCounts> partial(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
    {
        NounCounts& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 256)
        for (std::ptrdiff_t si = 0; si < n; ++si) {
            const auto& s = sentences[static_cast<std::size_t>(si)];
            std::vector<bool> mask;
            try {
                mask = tagger.noun_mask(s);
            } catch (const TaggerError&) {
                ++local.tagger_failures;
                continue;
            }
            for (std::size_t i = 0; i < s.tokens.size() && i < mask.size(); ++i) {
                if (mask[i])
                    ++local.counts[s.tokens[i]];
            }
        }
    }
    NounCounts out;
    for (auto& p : partial) {
        merge_into(out.counts, p.counts);
        out.tagger_failures += p.tagger_failures;
    }
    return out;
}

std::vector<double> top_similarity_sums(const UnitVectors& vectors, std::span<const std::size_t> queries,
                                        std::size_t n)
{
    std::vector<double> out(queries.size(), 0.0);
    const auto nq = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel
    {
        std::vector<double> sims;
        sims.reserve(vectors.rows);
#pragma omp for schedule(dynamic, 4)
        for (std::ptrdiff_t qi = 0; qi < nq; ++qi) {
            const std::size_t q = queries[static_cast<std::size_t>(qi)];
            sims.clear();
            const auto qrow = vectors.row(q);
            for (std::size_t r = 0; r < vectors.rows; ++r) {
                if (r != q)
                    sims.push_back(dot(qrow, vectors.row(r)));
            }
            out[static_cast<std::size_t>(qi)] = sum_of_largest(sims, n);
        }
    }
    return out;
}

VoteTotals accumulate_votes(std::span<const PairVote> votes, std::size_t n)
{
    for (const auto& vote : votes) {
        if (vote.first >= n || vote.second >= n || vote.first == vote.second)
            throw std::out_of_range("relation vote references an invalid synset pair");
    }
    VoteTotals t{n, std::vector<double>(n * n, 0.0), std::vector<std::uint64_t>(n * n, 0)};
    // Rows are owned by threads (row % threads), and every thread scans the
    // votes in input order, so each cell sees the same summation order as the
    // serial kernel.
#pragma omp parallel
    {
        const auto threads = static_cast<std::size_t>(omp_get_num_threads());
        const auto me = static_cast<std::size_t>(omp_get_thread_num());
        for (const auto& vote : votes) {
            const std::size_t a = vote.first;
            const std::size_t b = vote.second;
            if (b % threads == me) {
                t.v[b * n + a] += vote.p1;
                ++t.pairs[b * n + a];
            }
            if (a % threads == me) {
                t.v[a * n + b] += vote.p2;
                ++t.pairs[a * n + b];
            }
        }
    }
    return t;
}

} // namespace meronomy::kernels::omp
