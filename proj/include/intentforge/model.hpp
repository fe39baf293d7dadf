#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace intentforge {

using NodeId = std::string;

enum class NodeKind { Class, Interface, Method, Constructor, Field };
enum class EdgeKind { Define, Call, Param, Overload, Implement, Extend };
enum class Direction { Out, In, Both };

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);
NodeKind parse_node_kind(std::string_view text);  // throws IndexIntegrityError
EdgeKind parse_edge_kind(std::string_view text);  // throws IndexIntegrityError

inline bool is_callable(NodeKind kind) {
    return kind == NodeKind::Method || kind == NodeKind::Constructor;
}
inline bool is_type(NodeKind kind) {
    return kind == NodeKind::Class || kind == NodeKind::Interface;
}

// 1-based, inclusive.
struct Span {
    int start_line = 1;
    int end_line = 1;
    auto operator<=>(const Span&) const = default;
};

struct EntityNode {
    NodeId id;
    NodeKind kind = NodeKind::Class;
    std::string simple_name;
    // Declaration form: `class Server`, `Server create(ThreadPool)`,
    // `Server(ThreadPool)`, `int port`.
    std::string signature;
    std::string file_path;  // project-relative, '/' separated
    Span span;
    std::string body_text;  // full declaration text; empty without a body
    std::vector<std::string> annotations;

    bool operator==(const EntityNode&) const = default;

    // `name(T1, T2)` for callables, the simple name otherwise.
    std::string short_signature() const;
    bool has_annotation(std::string_view name) const;
};

struct RelationEdge {
    NodeId src;
    NodeId dst;
    EdgeKind kind = EdgeKind::Define;

    auto operator<=>(const RelationEdge&) const = default;
};

// Immutable after construction. Nodes are kept sorted by id and edges by
// (src, dst, kind); the constructor enforces id uniqueness and referential
// integrity.
class CodeGraph {
public:
    CodeGraph() = default;
    CodeGraph(std::vector<EntityNode> nodes, std::vector<RelationEdge> edges,
              std::string project_root);

    const std::vector<EntityNode>& nodes() const { return nodes_; }
    const std::vector<RelationEdge>& edges() const { return edges_; }
    const std::string& project_root() const { return project_root_; }

    const EntityNode* find(std::string_view id) const;
    const EntityNode& at(std::string_view id) const;  // throws UnknownEntityError
    bool contains(std::string_view id) const { return find(id) != nullptr; }

    // Indices into edges(), sorted.
    const std::vector<std::size_t>& out_edges(std::string_view id) const;
    const std::vector<std::size_t>& in_edges(std::string_view id) const;

    // Nodes declared in `file`, in source order (start line, then id).
    std::vector<const EntityNode*> nodes_in_file(std::string_view file) const;

    // Declaring type of a member via its incoming Define edge.
    const EntityNode* owner_of(std::string_view id) const;

    bool operator==(const CodeGraph& other) const {
        return nodes_ == other.nodes_ && edges_ == other.edges_ &&
               project_root_ == other.project_root_;
    }

private:
    std::size_t index_of(std::string_view id) const;

    std::vector<EntityNode> nodes_;
    std::vector<RelationEdge> edges_;
    std::string project_root_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
};

struct NeighborEntry {
    RelationEdge edge;
    const EntityNode* node = nullptr;
};

// Incident edges of `node` restricted to `kinds` (empty = all kinds) with the
// far-end node. Sorted by edge.
std::vector<NeighborEntry> neighbors(const CodeGraph& graph, std::string_view node,
                                     const std::vector<EdgeKind>& kinds,
                                     Direction direction);

struct ValidationIntention {
    std::string objective;
    std::vector<std::string> preconditions;
    std::vector<std::string> expected_results;

    bool operator==(const ValidationIntention&) const = default;
};

// Which intention sections a rendering includes.
struct IntentionSections {
    bool objective = true;
    bool preconditions = true;
    bool expected_results = true;
};

// Objective, then Preconditions, then Expected Results. Empty optional
// sections are omitted.
std::string render_intention(const ValidationIntention& desc,
                             IntentionSections sections = {});

// Parses the rendered form (also tolerant of markdown emphasis, numbering and
// inline section content). Returns nullopt when no objective is found.
std::optional<ValidationIntention> parse_intention(std::string_view text);

nlohmann::json to_json(const ValidationIntention& desc);
ValidationIntention intention_from_json(const nlohmann::json& j);

struct MethodTestPair {
    NodeId focal;
    NodeId test;
    ValidationIntention desc;

    bool operator==(const MethodTestPair&) const = default;
    const NodeId& id() const { return test; }
};

struct NodeFact {
    NodeId node;
    bool operator==(const NodeFact&) const = default;
};
struct EdgeFact {
    RelationEdge edge;
    bool operator==(const EdgeFact&) const = default;
};
using FactSubject = std::variant<NodeFact, EdgeFact>;

struct CrucialFact {
    FactSubject subject;
    std::string rendered;
    double sim = 0.0;
    double occu_raw = 0.0;
    double occu = 0.0;
    double likelihood = 0.0;

    // Stable key used for ordering and tie-breaking.
    std::string key() const;
};

enum class OutcomeStatus { CompilationFailure, ExecutionFailure, AssertionFailure, Pass };
std::string_view to_string(OutcomeStatus status);
OutcomeStatus parse_outcome_status(std::string_view text);

struct TraceRecord {
    std::string stage;
    nlohmann::json data;
    bool operator==(const TraceRecord&) const = default;
};

struct GenerationOutcome {
    OutcomeStatus status = OutcomeStatus::CompilationFailure;
    std::string test_text;
    int outer_iterations = 0;
    int refine_rounds = 0;
    std::vector<TraceRecord> trace;
    std::optional<std::string> aborted;  // set when a provider error ended the run
};

nlohmann::json to_json(const GenerationOutcome& outcome, bool include_trace = false);

// JSON Lines, one record per stage event.
std::string trace_to_jsonl(const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> trace_from_jsonl(std::string_view text);

// Index persistence: `graph.json` and `pairs.json` under `dir`.
void save_index(const CodeGraph& graph, const std::vector<MethodTestPair>& pairs,
                const std::filesystem::path& dir);
std::pair<CodeGraph, std::vector<MethodTestPair>> load_index(const std::filesystem::path& dir);

// Serialized forms, exposed for tests and tools.
std::string graph_to_json_text(const CodeGraph& graph);
std::string pairs_to_json_text(const std::vector<MethodTestPair>& pairs);

}  // namespace intentforge
