#pragma once

// Data-parallel inner loops of the pipeline. Every kernel has a plain serial
// version, kept as the reference the OpenMP version is tested against, and an
// OpenMP version used by the pipeline. Both backends produce bit-identical
// results: counts are merged by addition, and floating-point cells are summed
// in input order by the single thread that owns them.

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace meronomy {
struct ReviewSentence;
class PosTagger;
} // namespace meronomy

namespace meronomy::kernels {

enum class Backend { serial, openmp };

const char* backend_name(Backend b);

struct NgramCounts {
    std::unordered_map<std::string, std::uint64_t> unigrams;
    std::unordered_map<std::string, std::uint64_t> pairs; // "a b"
    std::uint64_t total = 0;
};

NgramCounts count_ngrams(std::span<const ReviewSentence> sentences, Backend backend);

struct NounCounts {
    std::unordered_map<std::string, std::uint64_t> counts;
    std::size_t tagger_failures = 0;
};

/// Counts every token occurrence the tagger marks as a noun.
NounCounts count_nouns(std::span<const ReviewSentence> sentences, const PosTagger& tagger, Backend backend);

/// Row-major matrix of L2-normalized vectors.
struct UnitVectors {
    std::span<const double> data;
    std::size_t rows = 0;
    std::size_t dim = 0;

    std::span<const double> row(std::size_t i) const { return data.subspan(i * dim, dim); }
};

double dot(std::span<const double> a, std::span<const double> b);

/// For each query row q: the sum of the n largest cosine similarities between
/// q and every other row.
std::vector<double> top_similarity_sums(const UnitVectors& vectors, std::span<const std::size_t> queries,
                                        std::size_t n, Backend backend);

/// One relation vote between the synsets of the first and second mention.
struct PairVote {
    std::uint32_t first = 0;
    std::uint32_t second = 0;
    double p1 = 0.0; // second is a feature of first
    double p2 = 0.0; // first is a feature of second
};

struct VoteTotals {
    std::size_t n = 0;
    std::vector<double> v;        // n*n, v[i*n+j]: mass for "i is a feature of j"
    std::vector<std::uint64_t> pairs; // n*n, symmetric sentence counts
};

VoteTotals accumulate_votes(std::span<const PairVote> votes, std::size_t n, Backend backend);

} // namespace meronomy::kernels
