#include "impl.hpp"

namespace meronomy::kernels {

NgramCounts count_ngrams(std::span<const ReviewSentence> sentences, Backend backend)
{
    return backend == Backend::serial ? serial::count_ngrams(sentences) : omp::count_ngrams(sentences);
}

NounCounts count_nouns(std::span<const ReviewSentence> sentences, const PosTagger& tagger, Backend backend)
{
    return backend == Backend::serial ? serial::count_nouns(sentences, tagger) : omp::count_nouns(sentences, tagger);
}

std::vector<double> top_similarity_sums(const UnitVectors& vectors, std::span<const std::size_t> queries,
                                        std::size_t n, Backend backend)
{
    return backend == Backend::serial ? serial::top_similarity_sums(vectors, queries, n)
                                      : omp::top_similarity_sums(vectors, queries, n);
}

VoteTotals accumulate_votes(std::span<const PairVote> votes, std::size_t n, Backend backend)
{
    return backend == Backend::serial ? serial::accumulate_votes(votes, n) : omp::accumulate_votes(votes, n);
}

} // namespace meronomy::kernels
