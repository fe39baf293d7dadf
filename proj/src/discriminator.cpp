#include "intentforge/discriminator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "intentforge/error.hpp"

namespace intentforge::discriminator {

namespace {

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80;
}

std::string label(const EntityNode& n) { return n.short_signature(); }

const EntityNode* first_constructor(const std::vector<const EntityNode*>& nodes) {
    const EntityNode* best = nullptr;
    for (const auto* n : nodes)
        if (n->kind == NodeKind::Constructor && (!best || n->span < best->span)) best = n;
    return best;
}

}  // namespace

ExplorationSeed make_seed(const CodeGraph& graph, std::string_view focal,
                          const std::optional<NodeId>& reference_test) {
    const auto& f = graph.at(focal);
    ExplorationSeed seed{{f.id}};
    if (reference_test) seed.nodes.push_back(graph.at(*reference_test).id);
    if (f.kind != NodeKind::Constructor) {
        const EntityNode* ctor = nullptr;
        if (const auto* owner = graph.owner_of(f.id)) {
            std::vector<const EntityNode*> members;
            for (auto e : graph.out_edges(owner->id)) {
                const auto& edge = graph.edges()[e];
                if (edge.kind == EdgeKind::Define) members.push_back(&graph.at(edge.dst));
            }
            ctor = first_constructor(members);
        }
        if (!ctor) ctor = first_constructor(graph.nodes_in_file(f.file_path));
        if (ctor) seed.nodes.push_back(ctor->id);
    }
    std::sort(seed.nodes.begin(), seed.nodes.end());
    seed.nodes.erase(std::unique(seed.nodes.begin(), seed.nodes.end()), seed.nodes.end());
    return seed;
}

std::vector<CrucialFact> explore(const CodeGraph& graph, const ExplorationSeed& seeds, int depth,
                                 const std::set<NodeId>& exclude) {
    std::map<NodeId, int> dist;
    std::deque<NodeId> queue;
    for (const auto& s : seeds.nodes) {
        graph.at(s);
        if (dist.emplace(s, 0).second) queue.push_back(s);
    }
    std::set<RelationEdge> edges;
    while (!queue.empty()) {
        auto id = queue.front();
        queue.pop_front();
        const int d = dist.at(id);
        if (d >= depth) continue;
        for (const auto& nb : neighbors(graph, id, {}, Direction::Both)) {
            if (exclude.count(nb.node->id)) continue;
            edges.insert(nb.edge);
            if (dist.emplace(nb.node->id, d + 1).second) queue.push_back(nb.node->id);
        }
    }
    const std::set<NodeId> seed_set(seeds.nodes.begin(), seeds.nodes.end());
    std::vector<CrucialFact> facts;
    for (const auto& [id, d] : dist)
        if (!seed_set.count(id)) facts.push_back({NodeFact{id}, {}});
    for (const auto& e : edges) facts.push_back({EdgeFact{e}, {}});
    std::sort(facts.begin(), facts.end(),
              [](const CrucialFact& a, const CrucialFact& b) { return a.key() < b.key(); });
    return facts;
}

const std::string& anchor_name(const CrucialFact& fact, const CodeGraph& graph) {
    if (const auto* n = std::get_if<NodeFact>(&fact.subject)) return graph.at(n->node).simple_name;
    return graph.at(std::get<EdgeFact>(fact.subject).edge.dst).simple_name;
}

int count_identifier(std::string_view text, std::string_view word) {
    if (word.empty()) return 0;
    int count = 0;
    for (auto pos = text.find(word); pos != std::string_view::npos; pos = text.find(word, pos + 1)) {
        const bool left = pos == 0 || !ident_char(text[pos - 1]);
        const auto end = pos + word.size();
        const bool right = end == text.size() || !ident_char(text[end]);
        if (left && right) ++count;
    }
    return count;
}

std::vector<double> occurrence_raw(const std::vector<CrucialFact>& candidates,
                                   const std::vector<source::Usage>& usages,
                                   const std::vector<double>& alignments, const CodeGraph& graph) {
    if (usages.size() != alignments.size())
        throw std::invalid_argument("one alignment score per usage is required");
    std::vector<double> occu(candidates.size(), 0.0);
    std::vector<const std::string*> anchors;
    for (const auto& f : candidates) anchors.push_back(&anchor_name(f, graph));
    std::vector<int> counts(candidates.size());
    for (std::size_t j = 0; j < usages.size(); ++j) {
        double total = 0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            counts[i] = count_identifier(usages[j].text, *anchors[i]);
            total += counts[i];
        }
        if (total == 0) continue;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            occu[i] += alignments[j] * (counts[i] / total);
    }
    return occu;
}

double fact_occurrence(const CrucialFact& fact, const std::vector<source::Usage>& usages,
                       const std::vector<double>& alignments,
                       const std::vector<CrucialFact>& all_facts, const CodeGraph& graph) {
    auto key = fact.key();
    auto occu = occurrence_raw(all_facts, usages, alignments, graph);
    for (std::size_t i = 0; i < all_facts.size(); ++i)
        if (all_facts[i].key() == key) return occu[i];
    // A fact outside the candidate set still competes against it.
    auto extended = all_facts;
    extended.push_back(fact);
    return occurrence_raw(extended, usages, alignments, graph).back();
}

std::vector<CrucialFact> combine_scores(std::vector<CrucialFact> candidates,
                                        const std::vector<double>& sims,
                                        const std::vector<double>& occu_raw,
                                        const RankOptions& options) {
    auto occu = options.normalize_occurrence ? retrieval::min_max_normalize(occu_raw) : occu_raw;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto& f = candidates[i];
        f.sim = sims[i];
        f.occu_raw = occu_raw[i];
        f.occu = occu[i];
        f.likelihood = options.beta * f.sim + (1 - options.beta) * f.occu;
    }
    std::vector<std::pair<std::string, std::size_t>> order;
    for (std::size_t i = 0; i < candidates.size(); ++i) order.emplace_back(candidates[i].key(), i);
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        double la = candidates[a.second].likelihood, lb = candidates[b.second].likelihood;
        if (la != lb) return la > lb;
        return a.first < b.first;
    });
    std::vector<CrucialFact> out;
    out.reserve(candidates.size());
    for (const auto& [_, i] : order) out.push_back(std::move(candidates[i]));
    return out;
}

std::vector<CrucialFact> score_facts(const std::vector<CrucialFact>& candidates,
                                     const ValidationIntention& desc_tar,
                                     const std::vector<source::Usage>& usages,
                                     retrieval::EmbeddingProvider& provider, const CodeGraph& graph,
                                     const RankOptions& options) {
    const auto target = render_intention(desc_tar);
    std::vector<CrucialFact> facts = candidates;
    std::vector<double> sims;
    for (auto& f : facts) {
        f.rendered = render_fact(f, graph);
        sims.push_back(retrieval::semantic_sim(provider, f.rendered, target));
    }
    std::vector<double> alignments;
    for (const auto& u : usages) alignments.push_back(retrieval::semantic_sim(provider, target, u.text));
    auto occu = occurrence_raw(facts, usages, alignments, graph);
    return combine_scores(std::move(facts), sims, occu, options);
}

std::vector<CrucialFact> rank_facts(const std::vector<CrucialFact>& candidates,
                                    const ValidationIntention& desc_tar,
                                    const std::vector<source::Usage>& usages,
                                    retrieval::EmbeddingProvider& provider, const CodeGraph& graph,
                                    const RankOptions& options) {
    auto scored = score_facts(candidates, desc_tar, usages, provider, graph, options);
    if (scored.size() > options.top_k) scored.resize(options.top_k);
    return scored;
}

std::string render_fact(const CrucialFact& fact, const CodeGraph& graph) {
    if (const auto* nf = std::get_if<NodeFact>(&fact.subject)) {
        const auto& n = graph.at(nf->node);
        std::string out = std::string(to_string(n.kind)) + " " + n.signature + " declared in " + n.file_path;
        if (is_callable(n.kind) && !n.body_text.empty()) {
            std::istringstream body(n.body_text);
            std::string line;
            for (int i = 0; i < 10 && std::getline(body, line); ++i) out += "\n" + line;
        }
        return out;
    }
    const auto& e = std::get<EdgeFact>(fact.subject).edge;
    const auto a = label(graph.at(e.src));
    const auto b = label(graph.at(e.dst));
    switch (e.kind) {
        case EdgeKind::Define: return a + " declares " + b;
        case EdgeKind::Call: return a + " calls " + b;
        case EdgeKind::Param: return a + " takes a parameter of type " + b;
        case EdgeKind::Overload: return a + " is an overload of " + b;
        case EdgeKind::Implement: return a + " implements " + b;
        case EdgeKind::Extend: return a + " extends " + b;
    }
    return a + " relates to " + b;
}

nlohmann::json to_json(const CrucialFact& fact) {
    return {{"key", fact.key()},     {"rendered", fact.rendered}, {"sim", fact.sim},
            {"occu_raw", fact.occu_raw}, {"occu", fact.occu},     {"likelihood", fact.likelihood}};
}

}  // namespace intentforge::discriminator
