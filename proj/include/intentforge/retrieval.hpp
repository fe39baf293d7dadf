#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "intentforge/model.hpp"

namespace intentforge::retrieval {

struct TokenizedDoc {
    std::vector<std::string> tokens;
    std::string source_id;
    bool operator==(const TokenizedDoc&) const = default;
};

// Splits on non-alphanumerics, then camelCase / acronym boundaries, lowercases.
// Bytes >= 0x80 count as letters so non-ASCII words stay whole.
TokenizedDoc tokenize_code(std::string_view text, std::string source_id = {});

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

std::vector<double> bm25_raw(const TokenizedDoc& query, const std::vector<TokenizedDoc>& corpus,
                             Bm25Params params = {});

// (x - min) / (max - min), all zeros when max == min. Results are snapped to a
// 1e-9 grid so that positive affine transforms of the input give bit-identical
// output despite floating-point rounding.
std::vector<double> min_max_normalize(const std::vector<double>& scores);
double snap(double x);

// Throws EmptyCorpusError on an empty corpus.
std::vector<double> bm25_normalized(const TokenizedDoc& query,
                                    const std::vector<TokenizedDoc>& corpus,
                                    Bm25Params params = {});

// --- embeddings -------------------------------------------------------------

struct EmbeddingVector {
    std::vector<double> values;
    std::string provider_id;
    std::size_t dim() const { return values.size(); }
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    // Throws EmbeddingProviderError.
    virtual EmbeddingVector embed(std::string_view text) = 0;
};

// Signed feature hashing of token 1-3 grams; deterministic and offline.
class HashEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HashEmbeddingProvider(std::size_t dim = 256) : dim_(dim) {}
    std::string id() const override { return "hash-" + std::to_string(dim_); }
    EmbeddingVector embed(std::string_view text) override;

private:
    std::size_t dim_;
};

struct HttpEmbeddingConfig {
    std::string endpoint;
    std::string api_key_env;  // name of the env var holding the key; empty: no auth
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    double timeout_seconds = 60;
    int max_retries = 3;
    double backoff_seconds = 1;
};

// POST {"input": text} -> {"embedding": [...]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpEmbeddingConfig config);
    std::string id() const override { return "http:" + config_.endpoint; }
    EmbeddingVector embed(std::string_view text) override;

private:
    HttpEmbeddingConfig config_;
};

// Memoizes another provider by input text; safe for concurrent callers.
class CachingEmbeddingProvider : public EmbeddingProvider {
public:
    explicit CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner)
        : inner_(std::move(inner)) {}
    std::string id() const override { return inner_->id(); }
    EmbeddingVector embed(std::string_view text) override;

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::mutex mutex_;
    std::map<std::string, EmbeddingVector, std::less<>> cache_;
};

// Cosine clamped to [0, 1]; 0 when either vector is zero.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

// 1.0 when a == b, otherwise the clamped cosine of the two embeddings.
double semantic_sim(EmbeddingProvider& provider, std::string_view a, std::string_view b);

// --- reference selection ----------------------------------------------------

struct RefScore {
    const MethodTestPair* pair = nullptr;
    double code_sim = 0;
    double desc_sim = 0;
    double ref = 0;
};

// Ranks `pairs` as references for the target focal code and intention. The
// focal text of each pair is taken from `graph`. Descending by ref, ties by
// pair id.
std::vector<RefScore> ref_score(std::string_view m_tar, const ValidationIntention& desc_tar,
                                const std::vector<MethodTestPair>& pairs, const CodeGraph& graph,
                                double alpha, EmbeddingProvider& provider);

// Combines precomputed similarities; exposed for the formula oracles.
std::vector<RefScore> rank_references(const std::vector<MethodTestPair>& pairs,
                                      const std::vector<double>& code_sim,
                                      const std::vector<double>& desc_sim, double alpha);

// --- referability ------------------------------------------------------------

// sim(i, j) for i != j, in [0, 1].
using PairwiseSimilarity = std::function<double(std::size_t, std::size_t)>;

// Row i holds normalized BM25 scores of every other test against test i as the
// query; the diagonal is unused (0).
std::vector<std::vector<double>> similarity_matrix(const std::vector<TokenizedDoc>& tests,
                                                   Bm25Params params = {});

double reference_availability(std::size_t n, const PairwiseSimilarity& sim, double th);
double referability_level(std::size_t n, const PairwiseSimilarity& sim, double th);
double reference_availability(const std::vector<TokenizedDoc>& tests, double th);
double referability_level(const std::vector<TokenizedDoc>& tests, double th);

struct ReferabilityRow {
    double threshold = 0;
    double ra = 0;
    double rl = 0;
};

// RA and RL at thresholds 0.1, 0.2, ..., 0.9 from one similarity matrix.
std::vector<ReferabilityRow> referability_table(const std::vector<TokenizedDoc>& tests);

}  // namespace intentforge::retrieval
