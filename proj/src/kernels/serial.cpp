#include <algorithm>
#include <functional>
#include <stdexcept>

#include "impl.hpp"
#include "meronomy/corpus.hpp"
#include "meronomy/tagger.hpp"

namespace meronomy::kernels {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += a[k] * b[k];
    return s;
}

double sum_of_largest(std::vector<double>& values, std::size_t n)
{
    n = std::min(n, values.size());
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n), values.end(),
                     std::greater<>());
    // Sort the selected prefix so the summation order is fixed.
    std::sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n), std::greater<>());
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        s += values[k];
    return s;
}

const char* backend_name(Backend b)
{
    return b == Backend::serial ? "serial" : "openmp";
}

namespace serial {

NgramCounts count_ngrams(std::span<const ReviewSentence> sentences)
{
    NgramCounts out;
    for (const auto& s : sentences) {
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            ++out.unigrams[s.tokens[i]];
            ++out.total;
            if (i + 1 < s.tokens.size())
                ++out.pairs[s.tokens[i] + " " + s.tokens[i + 1]];
        }
    }
    return out;
}

NounCounts count_nouns(std::span<const ReviewSentence> sentences, const PosTagger& tagger)
{
    NounCounts out;
    for (const auto& s : sentences) {
        std::vector<bool> mask;
        try {
            mask = tagger.noun_mask(s);
        } catch (const TaggerError&) {
            ++out.tagger_failures;
            continue;
        }
        for (std::size_t i = 0; i < s.tokens.size() && i < mask.size(); ++i) {
            if (mask[i])
                ++out.counts[s.tokens[i]];
        }
    }
    return out;
}

std::vector<double> top_similarity_sums(const UnitVectors& vectors, std::span<const std::size_t> queries,
                                        std::size_t n)
{
    std::vector<double> out;
    out.reserve(queries.size());
    for (std::size_t q : queries) {
        std::vector<double> sims;
        sims.reserve(vectors.rows);
        for (std::size_t r = 0; r < vectors.rows; ++r) {
            if (r != q)
                sims.push_back(dot(vectors.row(q), vectors.row(r)));
        }
        std::sort(sims.begin(), sims.end(), std::greater<>());
        double s = 0.0;
        for (std::size_t k = 0; k < n && k < sims.size(); ++k)
            s += sims[k];
        out.push_back(s);
    }
    return out;
}

VoteTotals accumulate_votes(std::span<const PairVote> votes, std::size_t n)
{
    VoteTotals t{n, std::vector<double>(n * n, 0.0), std::vector<std::uint64_t>(n * n, 0)};
    for (const auto& vote : votes) {
        if (vote.first >= n || vote.second >= n || vote.first == vote.second)
            throw std::out_of_range("relation vote references an invalid synset pair");
        t.v[vote.second * n + vote.first] += vote.p1;
        t.v[vote.first * n + vote.second] += vote.p2;
        ++t.pairs[vote.first * n + vote.second];
        ++t.pairs[vote.second * n + vote.first];
    }
    return t;
}

} // namespace serial

} // namespace meronomy::kernels
