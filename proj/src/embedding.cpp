#include "meronomy/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <omp.h>

#include "meronomy/common.hpp"

namespace meronomy {

EmbeddingTable::EmbeddingTable(std::vector<std::string> vocab, std::vector<float> vectors, std::size_t dim,
                               std::vector<std::uint64_t> counts)
    : vocab_(std::move(vocab)), counts_(std::move(counts)), vectors_(std::move(vectors)), dim_(dim)
{
    if (dim_ == 0 || vectors_.size() != vocab_.size() * dim_)
        throw DataError("embedding table: vector data does not match vocab size times dimension");
    if (counts_.empty())
        counts_.assign(vocab_.size(), 0);
    if (counts_.size() != vocab_.size())
        throw DataError("embedding table: count list does not match vocab size");
    index_.reserve(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        if (!index_.emplace(vocab_[i], i).second)
            throw DataError("embedding table: duplicate term '" + vocab_[i] + "'");
    }
}

std::span<const float> EmbeddingTable::vector(std::size_t i) const
{
    return std::span<const float>(vectors_).subspan(i * dim_, dim_);
}

bool EmbeddingTable::contains(std::string_view term) const
{
    return index_.count(std::string(term)) != 0;
}

std::size_t EmbeddingTable::index_of(std::string_view term) const
{
    auto it = index_.find(std::string(term));
    if (it == index_.end())
        throw DataError("term '" + std::string(term) + "' is not in the embedding vocabulary");
    return it->second;
}

std::vector<double> EmbeddingTable::unit_rows() const
{
    std::vector<double> out(vectors_.begin(), vectors_.end());
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        double norm = 0.0;
        for (std::size_t k = 0; k < dim_; ++k)
            norm += out[i * dim_ + k] * out[i * dim_ + k];
        norm = std::sqrt(norm);
        if (norm == 0.0)
            continue;
        for (std::size_t k = 0; k < dim_; ++k)
            out[i * dim_ + k] /= norm;
    }
    return out;
}

double EmbeddingTable::cosine(std::string_view a, std::string_view b) const
{
    auto x = vector(index_of(a));
    auto y = vector(index_of(b));
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
        xy += static_cast<double>(x[k]) * y[k];
        xx += static_cast<double>(x[k]) * x[k];
        yy += static_cast<double>(y[k]) * y[k];
    }
    if (xx == 0.0 || yy == 0.0)
        return 0.0;
    return xy / std::sqrt(xx * yy);
}

void EmbeddingTable::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << "meronomy-vectors v1 " << (fingerprint.empty() ? "-" : fingerprint) << '\n';
    out << vocab_.size() << ' ' << dim_ << '\n';
    char buf[64];
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        out << vocab_[i] << ' ' << counts_[i];
        for (float v : vector(i)) {
            auto res = std::to_chars(buf, buf + sizeof buf, v);
            out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
        out << '\n';
    }
    if (!out)
        throw DataError("failed writing " + path.string());
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    std::istringstream header(line);
    std::string magic, version, fingerprint;
    header >> magic >> version >> fingerprint;
    if (magic != "meronomy-vectors" || version != "v1")
        throw DataError(path.string() + ": not a meronomy vectors file");

    std::size_t rows = 0, dim = 0;
    if (!std::getline(in, line) || !(std::istringstream(line) >> rows >> dim) || dim == 0)
        throw DataError(path.string() + ":2: bad size line");

    std::vector<std::string> vocab;
    std::vector<std::uint64_t> counts;
    std::vector<float> data;
    vocab.reserve(rows);
    counts.reserve(rows);
    data.reserve(rows * dim);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string where = path.string() + ":" + std::to_string(i + 3);
        if (!std::getline(in, line))
            throw DataError(where + ": file ends early");
        const char* p = line.data();
        const char* end = p + line.size();
        const char* space = std::find(p, end, ' ');
        vocab.emplace_back(p, space);
        p = space;
        std::uint64_t count = 0;
        while (p < end && *p == ' ')
            ++p;
        auto rc = std::from_chars(p, end, count);
        if (rc.ec != std::errc())
            throw DataError(where + ": bad count");
        counts.push_back(count);
        p = rc.ptr;
        for (std::size_t k = 0; k < dim; ++k) {
            while (p < end && *p == ' ')
                ++p;
            float v = 0.0f;
            auto rv = std::from_chars(p, end, v);
            if (rv.ec != std::errc())
                throw DataError(where + ": bad vector component");
            data.push_back(v);
            p = rv.ptr;
        }
    }
    EmbeddingTable table(std::move(vocab), std::move(data), dim, std::move(counts));
    table.fingerprint = fingerprint == "-" ? "" : fingerprint;
    return table;
}

// ---------------------------------------------------------------------------
// Training

namespace {

// The linear congruential generator of the reference word2vec tool.
struct Lcg {
    std::uint64_t state;

    std::uint64_t next()
    {
        state = state * 25214903917ULL + 11ULL;
        return state;
    }
    std::uint64_t below(std::uint64_t k) { return (next() >> 16) % k; }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

double sigmoid(double x)
{
    return 1.0 / (1.0 + std::exp(-x));
}

// log(1 + exp(x)) without overflow.
double softplus(double x)
{
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

struct Model {
    std::size_t dim;
    std::size_t window;
    std::size_t negatives;
    std::vector<float> syn0;
    std::vector<float> syn1;
    std::vector<double> cumulative; // unigram^0.75 mass
    std::vector<double> keep_prob;

    std::uint32_t negative(Lcg& rng) const
    {
        const double u = rng.uniform() * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return static_cast<std::uint32_t>(std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1));
    }
};

struct StepTotals {
    double loss = 0.0;
    std::uint64_t predictions = 0;
};

StepTotals train_sentence(Model& m, std::span<const std::uint32_t> sentence, double alpha, Lcg& rng,
                          std::vector<std::uint32_t>& kept, std::vector<double>& h, std::vector<double>& grad)
{
    kept.clear();
    for (auto w : sentence) {
        if (m.keep_prob[w] >= 1.0 || m.keep_prob[w] >= rng.uniform())
            kept.push_back(w);
    }
    StepTotals totals;
    const std::size_t d = m.dim;
    const auto len = kept.size();
    for (std::size_t pos = 0; pos < len; ++pos) {
        const std::size_t shrink = rng.below(m.window);
        const std::size_t reach = m.window - shrink;
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(len - 1, pos + reach);

        std::fill(h.begin(), h.end(), 0.0);
        std::size_t context = 0;
        for (std::size_t c = lo; c <= hi; ++c) {
            if (c == pos)
                continue;
            const float* v = &m.syn0[kept[c] * d];
            for (std::size_t k = 0; k < d; ++k)
                h[k] += v[k];
            ++context;
        }
        if (context == 0)
            continue;
        for (std::size_t k = 0; k < d; ++k)
            h[k] /= static_cast<double>(context);

        std::fill(grad.begin(), grad.end(), 0.0);
        const std::uint32_t center = kept[pos];
        for (std::size_t s = 0; s <= m.negatives; ++s) {
            std::uint32_t target = center;
            double label = 1.0;
            if (s > 0) {
                target = m.negative(rng);
                if (target == center)
                    continue;
                label = 0.0;
            }
            float* out = &m.syn1[target * d];
            double f = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                f += h[k] * out[k];
            totals.loss += label > 0.0 ? softplus(-f) : softplus(f);
            const double g = (label - sigmoid(f)) * alpha;
            for (std::size_t k = 0; k < d; ++k) {
                grad[k] += g * out[k];
                out[k] += static_cast<float>(g * h[k]);
            }
        }
        ++totals.predictions;
        for (std::size_t c = lo; c <= hi; ++c) {
            if (c == pos)
                continue;
            float* v = &m.syn0[kept[c] * d];
            for (std::size_t k = 0; k < d; ++k)
                v[k] += static_cast<float>(grad[k]);
        }
    }
    return totals;
}

} // namespace

EmbeddingTable train_cbow(std::span<const ReviewSentence> sentences, const CbowOptions& options,
                          std::span<const std::string> keep_terms)
{
    if (options.dim < 8)
        throw UsageError("embedding dimension must be at least 8");
    if (options.window == 0)
        throw UsageError("embedding window must be positive");
    if (options.epochs == 0)
        throw UsageError("embedding epochs must be positive");
    if (sentences.empty())
        throw DataError("cannot train embeddings on an empty corpus");

    const auto counts = token_counts(sentences);
    const std::unordered_set<std::string> keep(keep_terms.begin(), keep_terms.end());
    for (const auto& term : keep) {
        if (!counts.count(term))
            throw DataError("term '" + term + "' does not occur in the corpus");
    }

    std::vector<std::pair<std::string, std::uint64_t>> entries;
    for (const auto& [term, count] : counts) {
        if (count >= options.min_count || keep.count(term))
            entries.emplace_back(term, count);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (entries.empty())
        throw DataError("no word reaches the embedding frequency floor");

    std::vector<std::string> vocab;
    std::vector<std::uint64_t> vocab_counts;
    std::unordered_map<std::string, std::uint32_t> index;
    for (const auto& [term, count] : entries) {
        index.emplace(term, static_cast<std::uint32_t>(vocab.size()));
        vocab.push_back(term);
        vocab_counts.push_back(count);
    }
    const std::size_t V = vocab.size();
    const std::size_t d = options.dim;

    std::vector<std::vector<std::uint32_t>> corpus;
    corpus.reserve(sentences.size());
    std::uint64_t train_words = 0;
    for (const auto& s : sentences) {
        std::vector<std::uint32_t> ids;
        for (const auto& t : s.tokens) {
            auto it = index.find(t);
            if (it != index.end())
                ids.push_back(it->second);
        }
        train_words += ids.size();
        if (ids.size() >= 2)
            corpus.push_back(std::move(ids));
    }

    Model m{d, options.window, options.negatives, {}, {}, {}, {}};
    Lcg init{options.seed};
    m.syn0.resize(V * d);
    for (auto& x : m.syn0)
        x = static_cast<float>((init.uniform() - 0.5) / static_cast<double>(d));
    m.syn1.assign(V * d, 0.0f);
    m.cumulative.resize(V);
    double mass = 0.0;
    for (std::size_t i = 0; i < V; ++i) {
        mass += std::pow(static_cast<double>(vocab_counts[i]), 0.75);
        m.cumulative[i] = mass;
    }
    m.keep_prob.assign(V, 1.0);
    if (options.subsample > 0.0) {
        const double st = options.subsample * static_cast<double>(train_words);
        for (std::size_t i = 0; i < V; ++i) {
            const double cn = static_cast<double>(vocab_counts[i]);
            m.keep_prob[i] = (std::sqrt(cn / st) + 1.0) * st / cn;
        }
    }

    const double planned = static_cast<double>(options.epochs) * static_cast<double>(train_words) + 1.0;
    std::uint64_t processed = 0;
    std::vector<double> epoch_loss;
    const auto n_sentences = static_cast<std::ptrdiff_t>(corpus.size());

    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        double loss = 0.0;
        std::uint64_t predictions = 0;
        if (options.deterministic) {
            Lcg rng{options.seed * 0x9E3779B97F4A7C15ULL + epoch + 1};
            std::vector<std::uint32_t> kept;
            std::vector<double> h(d), grad(d);
            for (const auto& ids : corpus) {
                const double alpha =
                    options.learning_rate * std::max(1.0 - static_cast<double>(processed) / planned, 1e-4);
                auto t = train_sentence(m, ids, alpha, rng, kept, h, grad);
                loss += t.loss;
                predictions += t.predictions;
                processed += ids.size();
            }
        } else {
#pragma omp parallel reduction(+ : loss, predictions)
            {
                Lcg rng{options.seed * 0x9E3779B97F4A7C15ULL + epoch * 1000003ULL +
                        static_cast<std::uint64_t>(omp_get_thread_num()) + 1};
                std::vector<std::uint32_t> kept;
                std::vector<double> h(d), grad(d);
#pragma omp for schedule(static)
                for (std::ptrdiff_t i = 0; i < n_sentences; ++i) {
                    const auto& ids = corpus[static_cast<std::size_t>(i)];
                    std::uint64_t seen;
#pragma omp atomic read
                    seen = processed;
                    const double alpha =
                        options.learning_rate * std::max(1.0 - static_cast<double>(seen) / planned, 1e-4);
                    auto t = train_sentence(m, ids, alpha, rng, kept, h, grad);
                    loss += t.loss;
                    predictions += t.predictions;
#pragma omp atomic update
                    processed += ids.size();
                }
            }
        }
        epoch_loss.push_back(predictions ? loss / static_cast<double>(predictions) : 0.0);
    }

    EmbeddingTable table(std::move(vocab), std::move(m.syn0), d, std::move(vocab_counts));
    table.epoch_loss = std::move(epoch_loss);
    return table;
}

} // namespace meronomy
