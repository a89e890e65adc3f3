#pragma once

#include "meronomy/kernels.hpp"

namespace meronomy::kernels {

namespace serial {
NgramCounts count_ngrams(std::span<const ReviewSentence> sentences);
NounCounts count_nouns(std::span<const ReviewSentence> sentences, const PosTagger& tagger);
std::vector<double> top_similarity_sums(const UnitVectors& vectors, std::span<const std::size_t> queries,
                                        std::size_t n);
VoteTotals accumulate_votes(std::span<const PairVote> votes, std::size_t n);
} // namespace serial

namespace omp {
NgramCounts count_ngrams(std::span<const ReviewSentence> sentences);
NounCounts count_nouns(std::span<const ReviewSentence> sentences, const PosTagger& tagger);
std::vector<double> top_similarity_sums(const UnitVectors& vectors, std::span<const std::size_t> queries,
                                        std::size_t n);
VoteTotals accumulate_votes(std::span<const PairVote> votes, std::size_t n);
} // namespace omp

// Sum of the n largest entries of `values`.
double sum_of_largest(std::vector<double>& values, std::size_t n);

} // namespace meronomy::kernels
