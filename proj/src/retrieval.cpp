#include "intentforge/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <thread>
#include <unordered_map>

#include "intentforge/error.hpp"
#include "intentforge/http.hpp"

namespace intentforge::retrieval {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(unsigned char c) { return (c >= 'a' && c <= 'z') || c >= 0x80; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

void split_identifier(std::string_view word, std::vector<std::string>& out) {
    std::size_t start = 0;
    auto emit = [&](std::size_t end) {
        if (end <= start) return;
        std::string t(word.substr(start, end - start));
        for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(std::move(t));
        start = end;
    };
    for (std::size_t i = 1; i < word.size(); ++i) {
        auto prev = static_cast<unsigned char>(word[i - 1]);
        auto cur = static_cast<unsigned char>(word[i]);
        // fooBar, foo2Bar
        if (is_upper(cur) && (is_lower(prev) || is_digit(prev))) emit(i);
        // HTTPServer: the boundary sits before the last capital of the run
        else if (is_upper(prev) && is_upper(cur) && i + 1 < word.size() &&
                 is_lower(static_cast<unsigned char>(word[i + 1])))
            emit(i);
    }
    emit(word.size());
}

struct DocStats {
    std::unordered_map<std::string_view, int> tf;
    double length = 0;
};

DocStats stats_of(const TokenizedDoc& doc) {
    DocStats s;
    for (const auto& t : doc.tokens) ++s.tf[t];
    s.length = static_cast<double>(doc.tokens.size());
    return s;
}

// One document's BM25 score; the query is iterated token by token, repeats
// included. `df` returns the number of corpus documents containing a term.
template <typename Df>
double score_doc(const TokenizedDoc& query, const DocStats& doc, double avgdl, double n_docs,
                 const Df& df, Bm25Params p) {
    double score = 0;
    const double norm = avgdl > 0 ? doc.length / avgdl : 1.0;
    for (const auto& term : query.tokens) {
        auto it = doc.tf.find(term);
        if (it == doc.tf.end()) continue;
        const double n = df(term);
        const double idf = std::log((n_docs - n + 0.5) / (n + 0.5) + 1.0);
        const double tf = it->second;
        score += idf * tf * (p.k1 + 1) / (tf + p.k1 * (1 - p.b + p.b * norm));
    }
    return score;
}

}  // namespace

TokenizedDoc tokenize_code(std::string_view text, std::string source_id) {
    TokenizedDoc doc;
    doc.source_id = std::move(source_id);
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
        split_identifier(text.substr(i, j - i), doc.tokens);
        i = j;
    }
    return doc;
}

std::vector<double> bm25_raw(const TokenizedDoc& query, const std::vector<TokenizedDoc>& corpus,
                             Bm25Params params) {
    std::vector<DocStats> stats;
    stats.reserve(corpus.size());
    double total = 0;
    std::unordered_map<std::string_view, int> df;
    for (const auto& d : corpus) {
        stats.push_back(stats_of(d));
        total += stats.back().length;
        for (const auto& [t, _] : stats.back().tf) ++df[t];
    }
    const double n_docs = static_cast<double>(corpus.size());
    const double avgdl = corpus.empty() ? 0 : total / n_docs;
    auto lookup = [&](std::string_view t) {
        auto it = df.find(t);
        return it == df.end() ? 0.0 : static_cast<double>(it->second);
    };
    std::vector<double> scores;
    scores.reserve(corpus.size());
    for (const auto& s : stats) scores.push_back(score_doc(query, s, avgdl, n_docs, lookup, params));
    return scores;
}

double snap(double x) {
    // A decimal grid, so exact tenths land on the same doubles as the
    // thresholds they are compared against.
    constexpr double grid = 1e9;
    return std::nearbyint(x * grid) / grid;
}

std::vector<double> min_max_normalize(const std::vector<double>& scores) {
    if (scores.empty()) return {};
    auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const double min = *lo, max = *hi;
    std::vector<double> out(scores.size(), 0.0);
    if (!(max > min)) return out;
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = snap((scores[i] - min) / (max - min));
    return out;
}

std::vector<double> bm25_normalized(const TokenizedDoc& query,
                                    const std::vector<TokenizedDoc>& corpus, Bm25Params params) {
    if (corpus.empty()) throw EmptyCorpusError("BM25 needs a non-empty corpus");
    return min_max_normalize(bm25_raw(query, corpus, params));
}

// --- embeddings -------------------------------------------------------------

EmbeddingVector HashEmbeddingProvider::embed(std::string_view text) {
    EmbeddingVector v{std::vector<double>(dim_, 0.0), id()};
    auto add = [&](std::string_view feature) {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : feature) {
            h ^= c;
            h *= 1099511628211ull;
        }
        v.values[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    };
    auto tokens = tokenize_code(text).tokens;
    if (tokens.empty() && !text.empty()) add(text);
    for (std::size_t n = 1; n <= 3; ++n)
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            std::string gram = tokens[i];
            for (std::size_t k = 1; k < n; ++k) gram += ' ' + tokens[i + k];
            add(gram);
        }
    double norm = 0;
    for (double x : v.values) norm += x * x;
    if (norm > 0)
        for (double& x : v.values) x /= std::sqrt(norm);
    return v;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config)
    : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw ConfigError("embedding endpoint is not configured");
}

EmbeddingVector HttpEmbeddingProvider::embed(std::string_view text) {
    http::PostOptions options;
    options.timeout_seconds = config_.timeout_seconds;
    options.max_retries = config_.max_retries;
    options.backoff_seconds = config_.backoff_seconds;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key) throw EmbeddingProviderError("environment variable " + config_.api_key_env + " is not set");
        options.headers[config_.auth_header] = config_.auth_prefix + key;
    }
    nlohmann::json request{{"input", std::string(text)}};
    try {
        auto body = http::post_json(config_.endpoint, request.dump(), options);
        auto reply = nlohmann::json::parse(body);
        EmbeddingVector v{reply.at("embedding").get<std::vector<double>>(), id()};
        if (v.values.empty()) throw EmbeddingProviderError("empty embedding from " + config_.endpoint);
        return v;
    } catch (const http::HttpFailure& e) {
        throw EmbeddingProviderError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw EmbeddingProviderError("bad embedding response from " + config_.endpoint + ": " + e.what());
    }
}

EmbeddingVector CachingEmbeddingProvider::embed(std::string_view text) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(text); it != cache_.end()) return it->second;
    }
    auto v = inner_->embed(text);
    std::lock_guard lock(mutex_);
    return cache_.emplace(std::string(text), std::move(v)).first->second;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw EmbeddingProviderError("embedding dimensions differ: " + std::to_string(a.size()) +
                                     " vs " + std::to_string(b.size()));
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double semantic_sim(EmbeddingProvider& provider, std::string_view a, std::string_view b) {
    if (a == b) return 1.0;
    return cosine(provider.embed(a).values, provider.embed(b).values);
}

// --- reference selection ----------------------------------------------------

std::vector<RefScore> rank_references(const std::vector<MethodTestPair>& pairs,
                                      const std::vector<double>& code_sim,
                                      const std::vector<double>& desc_sim, double alpha) {
    std::vector<RefScore> out;
    out.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        out.push_back({&pairs[i], code_sim[i], desc_sim[i],
                       alpha * code_sim[i] + (1 - alpha) * desc_sim[i]});
    std::stable_sort(out.begin(), out.end(), [](const RefScore& x, const RefScore& y) {
        if (x.ref != y.ref) return x.ref > y.ref;
        return x.pair->id() < y.pair->id();
    });
    return out;
}

std::vector<RefScore> ref_score(std::string_view m_tar, const ValidationIntention& desc_tar,
                                const std::vector<MethodTestPair>& pairs, const CodeGraph& graph,
                                double alpha, EmbeddingProvider& provider) {
    if (pairs.empty()) throw EmptyCorpusError("no reference candidates");
    std::vector<TokenizedDoc> corpus;
    corpus.reserve(pairs.size());
    for (const auto& p : pairs) corpus.push_back(tokenize_code(graph.at(p.focal).body_text, p.id()));
    auto code_sim = bm25_normalized(tokenize_code(m_tar), corpus);

    const auto target = render_intention(desc_tar);
    std::vector<double> desc_sim;
    desc_sim.reserve(pairs.size());
    for (const auto& p : pairs) desc_sim.push_back(semantic_sim(provider, target, render_intention(p.desc)));
    return rank_references(pairs, code_sim, desc_sim, alpha);
}

// --- referability ------------------------------------------------------------

std::vector<std::vector<double>> similarity_matrix(const std::vector<TokenizedDoc>& tests,
                                                   Bm25Params params) {
    const std::size_t n = tests.size();
    if (n < 2) throw InsufficientCorpusError("referability needs at least 2 tests, got " + std::to_string(n));
    std::vector<DocStats> stats;
    stats.reserve(n);
    double total = 0;
    std::unordered_map<std::string_view, int> df;
    for (const auto& d : tests) {
        stats.push_back(stats_of(d));
        total += stats.back().length;
        for (const auto& [t, _] : stats.back().tf) ++df[t];
    }

    std::vector<std::vector<double>> matrix(n, std::vector<double>(n, 0.0));
    // Test i queries the corpus of all other tests: drop it from N, the
    // average length and the document frequencies.
    auto row = [&](std::size_t i) {
        const double n_docs = static_cast<double>(n - 1);
        const double avgdl = (total - stats[i].length) / n_docs;
        auto lookup = [&](std::string_view t) {
            auto it = df.find(t);
            double count = it == df.end() ? 0.0 : it->second;
            return stats[i].tf.count(t) ? count - 1 : count;
        };
        std::vector<double> raw;
        raw.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) raw.push_back(score_doc(tests[i], stats[j], avgdl, n_docs, lookup, params));
        auto norm = min_max_normalize(raw);
        for (std::size_t j = 0, k = 0; j < n; ++j)
            if (j != i) matrix[i][j] = norm[k++];
    };

    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers) row(i);
        }));
    for (auto& j : jobs) j.get();
    return matrix;
}

namespace {

void require_pairs(std::size_t n) {
    if (n < 2) throw InsufficientCorpusError("referability needs at least 2 tests, got " + std::to_string(n));
}

}  // namespace

double reference_availability(std::size_t n, const PairwiseSimilarity& sim, double th) {
    require_pairs(n);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = -1;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) best = std::max(best, sim(i, j));
        if (best > th) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

double referability_level(std::size_t n, const PairwiseSimilarity& sim, double th) {
    require_pairs(n);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && sim(i, j) > th) ++count;
    return static_cast<double>(count) / static_cast<double>(n);
}

double reference_availability(const std::vector<TokenizedDoc>& tests, double th) {
    auto m = similarity_matrix(tests);
    return reference_availability(tests.size(), [&](std::size_t i, std::size_t j) { return m[i][j]; }, th);
}

double referability_level(const std::vector<TokenizedDoc>& tests, double th) {
    auto m = similarity_matrix(tests);
    return referability_level(tests.size(), [&](std::size_t i, std::size_t j) { return m[i][j]; }, th);
}

std::vector<ReferabilityRow> referability_table(const std::vector<TokenizedDoc>& tests) {
    auto m = similarity_matrix(tests);
    PairwiseSimilarity sim = [&](std::size_t i, std::size_t j) { return m[i][j]; };
    std::vector<ReferabilityRow> rows;
    for (int k = 1; k <= 9; ++k) {
        double th = k / 10.0;
        rows.push_back({th, reference_availability(tests.size(), sim, th),
                        referability_level(tests.size(), sim, th)});
    }
    return rows;
}

}  // namespace intentforge::retrieval
