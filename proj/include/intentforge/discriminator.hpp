#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "intentforge/model.hpp"
#include "intentforge/retrieval.hpp"
#include "intentforge/source.hpp"

namespace intentforge::discriminator {

struct ExplorationSeed {
    std::vector<NodeId> nodes;
};

// The focal method, the referable test (when there is one) and, for a
// non-constructor focal, the first constructor declared by its class (or, if
// the class has none, the first one in the same file).
ExplorationSeed make_seed(const CodeGraph& graph, std::string_view focal,
                          const std::optional<NodeId>& reference_test);

// Breadth-first over every edge kind in both directions. Each non-seed node
// reached within `depth` hops and each edge incident to a node closer than
// `depth` becomes a candidate. Nodes in `exclude` are never entered and edges
// touching them are dropped. Sorted by fact key.
std::vector<CrucialFact> explore(const CodeGraph& graph, const ExplorationSeed& seeds, int depth,
                                 const std::set<NodeId>& exclude = {});

// Identifier counted in usages: the node's simple name, or for an edge the
// simple name of its destination.
const std::string& anchor_name(const CrucialFact& fact, const CodeGraph& graph);

// Whole-identifier, case-sensitive occurrences of `word` in `text`.
int count_identifier(std::string_view text, std::string_view word);

// occu_raw for every candidate: sum over usages of alignment_j times the
// candidate's share of all candidate occurrences in usage j.
std::vector<double> occurrence_raw(const std::vector<CrucialFact>& candidates,
                                   const std::vector<source::Usage>& usages,
                                   const std::vector<double>& alignments, const CodeGraph& graph);

// Single-fact form of the above.
double fact_occurrence(const CrucialFact& fact, const std::vector<source::Usage>& usages,
                       const std::vector<double>& alignments,
                       const std::vector<CrucialFact>& all_facts, const CodeGraph& graph);

struct RankOptions {
    double beta = 0.5;
    std::size_t top_k = 3;
    bool normalize_occurrence = true;  // false: use occu_raw unscaled
};

// Fills the score fields and orders by likelihood (descending), ties by key.
// Returns every candidate.
std::vector<CrucialFact> combine_scores(std::vector<CrucialFact> candidates,
                                        const std::vector<double>& sims,
                                        const std::vector<double>& occu_raw,
                                        const RankOptions& options);

// All candidates scored against the target intention and usages, best first.
std::vector<CrucialFact> score_facts(const std::vector<CrucialFact>& candidates,
                                     const ValidationIntention& desc_tar,
                                     const std::vector<source::Usage>& usages,
                                     retrieval::EmbeddingProvider& provider, const CodeGraph& graph,
                                     const RankOptions& options = {});

// The first `top_k` of score_facts.
std::vector<CrucialFact> rank_facts(const std::vector<CrucialFact>& candidates,
                                    const ValidationIntention& desc_tar,
                                    const std::vector<source::Usage>& usages,
                                    retrieval::EmbeddingProvider& provider, const CodeGraph& graph,
                                    const RankOptions& options = {});

// Node: "<Kind> <signature> declared in <file>", followed by up to 10 body
// lines for callables. Edge: one templated sentence per kind.
std::string render_fact(const CrucialFact& fact, const CodeGraph& graph);

nlohmann::json to_json(const CrucialFact& fact);

}  // namespace intentforge::discriminator
