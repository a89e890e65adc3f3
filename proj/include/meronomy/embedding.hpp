#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "meronomy/corpus.hpp"

namespace meronomy {

struct CbowOptions {
    std::size_t dim = 100;
    std::size_t window = 4;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    std::uint64_t min_count = 5;
    double learning_rate = 0.05;
    double subsample = 1e-3; // 0 disables frequent-word subsampling
    std::uint64_t seed = 1;
    /// Single-threaded training in corpus order; reproducible bit for bit.
    /// Otherwise sentences are shared among OpenMP threads without locking.
    bool deterministic = true;
};

/// Dense word vectors. Row i belongs to vocab()[i].
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    /// Throws DataError if sizes disagree or a term repeats.
    EmbeddingTable(std::vector<std::string> vocab, std::vector<float> vectors, std::size_t dim,
                   std::vector<std::uint64_t> counts = {});

    std::size_t size() const { return vocab_.size(); }
    std::size_t dim() const { return dim_; }
    std::span<const std::string> vocab() const { return vocab_; }
    std::span<const std::uint64_t> counts() const { return counts_; }
    std::span<const float> data() const { return vectors_; }
    std::span<const float> vector(std::size_t i) const;

    bool contains(std::string_view term) const;
    /// Throws DataError naming the term when absent.
    std::size_t index_of(std::string_view term) const;

    /// Double-precision copy of the table with every row scaled to unit length
    /// (zero rows stay zero).
    std::vector<double> unit_rows() const;
    double cosine(std::string_view a, std::string_view b) const;

    /// Mean loss per predicted word, one entry per epoch (empty for loaded tables).
    std::vector<double> epoch_loss;
    /// Free-form fingerprint written to the header line.
    std::string fingerprint;

    void save(const std::filesystem::path& path) const;
    static EmbeddingTable load(const std::filesystem::path& path);

private:
    std::vector<std::string> vocab_;
    std::vector<std::uint64_t> counts_;
    std::vector<float> vectors_;
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// CBOW with negative sampling over the phrased sentences. Words below
/// min_count are dropped unless listed in `keep_terms`; a kept term that never
/// occurs is a DataError. Throws UsageError for dim < 8 or a zero window,
/// DataError for an empty corpus.
EmbeddingTable train_cbow(std::span<const ReviewSentence> sentences, const CbowOptions& options = {},
                          std::span<const std::string> keep_terms = {});

} // namespace meronomy
