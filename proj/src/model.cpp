#include "intentforge/model.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "intentforge/error.hpp"

namespace intentforge {

namespace {

constexpr std::string_view kNodeKindNames[] = {"Class", "Interface", "Method", "Constructor",
                                               "Field"};
constexpr std::string_view kEdgeKindNames[] = {"Define",   "Call",      "Param",
                                               "Overload", "Implement", "Extend"};
constexpr std::string_view kStatusNames[] = {"CompilationFailure", "ExecutionFailure",
                                             "AssertionFailure", "Pass"};

std::string dump(const nlohmann::json& j) {
    return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IndexWriteError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IndexWriteError("failed writing " + path.string());
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IndexReadError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
        throw IndexReadError(path.string() + ": " + e.what());
    }
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(NodeKind kind) { return kNodeKindNames[static_cast<int>(kind)]; }
std::string_view to_string(EdgeKind kind) { return kEdgeKindNames[static_cast<int>(kind)]; }
std::string_view to_string(OutcomeStatus status) {
    return kStatusNames[static_cast<int>(status)];
}

NodeKind parse_node_kind(std::string_view text) {
    for (int i = 0; i < 5; ++i)
        if (kNodeKindNames[i] == text) return static_cast<NodeKind>(i);
    throw IndexIntegrityError("unknown node kind '" + std::string(text) + "'");
}

EdgeKind parse_edge_kind(std::string_view text) {
    for (int i = 0; i < 6; ++i)
        if (kEdgeKindNames[i] == text) return static_cast<EdgeKind>(i);
    throw IndexIntegrityError("unknown edge kind '" + std::string(text) + "'");
}

OutcomeStatus parse_outcome_status(std::string_view text) {
    for (int i = 0; i < 4; ++i)
        if (kStatusNames[i] == text) return static_cast<OutcomeStatus>(i);
    throw IndexReadError("unknown outcome status '" + std::string(text) + "'");
}

std::string EntityNode::short_signature() const {
    if (!is_callable(kind)) return simple_name;
    auto open = signature.find('(');
    if (open == std::string::npos) return simple_name;
    return simple_name + signature.substr(open);
}

bool EntityNode::has_annotation(std::string_view name) const {
    for (const auto& a : annotations) {
        auto dot = a.rfind('.');
        std::string_view last = dot == std::string::npos ? std::string_view(a)
                                                         : std::string_view(a).substr(dot + 1);
        if (a == name || last == name) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// CodeGraph

CodeGraph::CodeGraph(std::vector<EntityNode> nodes, std::vector<RelationEdge> edges,
                     std::string project_root)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), project_root_(std::move(project_root)) {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const EntityNode& a, const EntityNode& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (nodes_[i].id == nodes_[i - 1].id)
            throw IndexIntegrityError("duplicate node id '" + nodes_[i].id + "'");
    for (const auto& n : nodes_) {
        if (n.id.empty()) throw IndexIntegrityError("node with empty id");
        if (n.span.start_line > n.span.end_line || n.span.start_line < 1)
            throw IndexIntegrityError("invalid span on '" + n.id + "'");
    }

    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    out_.assign(nodes_.size(), {});
    in_.assign(nodes_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& edge = edges_[e];
        const auto* src = find(edge.src);
        const auto* dst = find(edge.dst);
        if (!src || !dst)
            throw IndexIntegrityError("edge " + edge.src + " -" +
                                      std::string(to_string(edge.kind)) + "-> " + edge.dst +
                                      " has a dangling endpoint");
        switch (edge.kind) {
            case EdgeKind::Overload:
                if (!is_callable(src->kind) || !is_callable(dst->kind) ||
                    src->simple_name != dst->simple_name || src->signature == dst->signature)
                    throw IndexIntegrityError("invalid Overload edge " + edge.src + " -> " +
                                              edge.dst);
                break;
            case EdgeKind::Implement:
                if (src->kind != NodeKind::Class || dst->kind != NodeKind::Interface)
                    throw IndexIntegrityError("invalid Implement edge " + edge.src + " -> " +
                                              edge.dst);
                break;
            case EdgeKind::Extend:
                if (!is_type(src->kind) || src->kind != dst->kind)
                    throw IndexIntegrityError("invalid Extend edge " + edge.src + " -> " +
                                              edge.dst);
                break;
            default:
                break;
        }
        out_[index_of(edge.src)].push_back(e);
        in_[index_of(edge.dst)].push_back(e);
    }

    for (const auto& n : nodes_) {
        if (n.kind != NodeKind::Constructor) continue;
        if (const auto* owner = owner_of(n.id); owner && owner->simple_name != n.simple_name)
            throw IndexIntegrityError("constructor '" + n.id +
                                      "' does not match its declaring class");
    }
}

std::size_t CodeGraph::index_of(std::string_view id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const EntityNode& n, std::string_view v) { return n.id < v; });
    if (it == nodes_.end() || it->id != id) return nodes_.size();
    return static_cast<std::size_t>(it - nodes_.begin());
}

const EntityNode* CodeGraph::find(std::string_view id) const {
    auto i = index_of(id);
    return i == nodes_.size() ? nullptr : &nodes_[i];
}

const EntityNode& CodeGraph::at(std::string_view id) const {
    if (const auto* n = find(id)) return *n;
    throw UnknownEntityError("unknown entity '" + std::string(id) + "'");
}

const std::vector<std::size_t>& CodeGraph::out_edges(std::string_view id) const {
    auto i = index_of(id);
    if (i == nodes_.size()) throw UnknownEntityError("unknown entity '" + std::string(id) + "'");
    return out_[i];
}

const std::vector<std::size_t>& CodeGraph::in_edges(std::string_view id) const {
    auto i = index_of(id);
    if (i == nodes_.size()) throw UnknownEntityError("unknown entity '" + std::string(id) + "'");
    return in_[i];
}

std::vector<const EntityNode*> CodeGraph::nodes_in_file(std::string_view file) const {
    std::vector<const EntityNode*> result;
    for (const auto& n : nodes_)
        if (n.file_path == file) result.push_back(&n);
    std::sort(result.begin(), result.end(), [](const EntityNode* a, const EntityNode* b) {
        return std::tie(a->span.start_line, a->id) < std::tie(b->span.start_line, b->id);
    });
    return result;
}

const EntityNode* CodeGraph::owner_of(std::string_view id) const {
    auto i = index_of(id);
    if (i == nodes_.size() || i >= in_.size()) return nullptr;
    for (auto e : in_[i])
        if (edges_[e].kind == EdgeKind::Define) return find(edges_[e].src);
    return nullptr;
}

std::vector<NeighborEntry> neighbors(const CodeGraph& graph, std::string_view node,
                                     const std::vector<EdgeKind>& kinds, Direction direction) {
    auto wanted = [&](EdgeKind k) {
        return kinds.empty() || std::find(kinds.begin(), kinds.end(), k) != kinds.end();
    };
    std::vector<NeighborEntry> result;
    if (direction != Direction::In)
        for (auto e : graph.out_edges(node)) {
            const auto& edge = graph.edges()[e];
            if (wanted(edge.kind)) result.push_back({edge, graph.find(edge.dst)});
        }
    if (direction != Direction::Out)
        for (auto e : graph.in_edges(node)) {
            const auto& edge = graph.edges()[e];
            if (!wanted(edge.kind)) continue;
            // A self-loop was already reported as an out-edge.
            if (direction == Direction::Both && edge.src == edge.dst) continue;
            result.push_back({edge, graph.find(edge.src)});
        }
    std::sort(result.begin(), result.end(),
              [](const NeighborEntry& a, const NeighborEntry& b) { return a.edge < b.edge; });
    return result;
}

// ---------------------------------------------------------------------------
// Intentions

std::string render_intention(const ValidationIntention& desc, IntentionSections sections) {
    std::string out;
    auto list = [&](std::string_view header, const std::vector<std::string>& items) {
        if (items.empty()) return;
        out += "# ";
        out += header;
        out += ":\n";
        for (std::size_t i = 0; i < items.size(); ++i)
            out += std::to_string(i + 1) + ". " + items[i] + "\n";
    };
    if (sections.objective) out += "# Objective:\n" + desc.objective + "\n";
    if (sections.preconditions) list("Preconditions", desc.preconditions);
    if (sections.expected_results) list("Expected Results", desc.expected_results);
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

std::optional<ValidationIntention> parse_intention(std::string_view text) {
    static const std::regex header(
        R"(^[\s#*_>]*(objective|preconditions?|expected\s+results?)\s*[*_]*\s*:?\s*[*_]*\s*(.*)$)",
        std::regex::icase);
    static const std::regex numbering(R"(^\s*(?:\d+[.)]|[-*+])\s+)");
    static const std::regex none_marker(R"(^\(?\s*(none|n/?a|-)\s*\.?\)?$)", std::regex::icase);

    ValidationIntention desc;
    int section = -1;  // 0 objective, 1 preconditions, 2 expected results
    std::vector<std::string> objective_lines;
    auto add = [&](std::string line) {
        line = trim(line);
        if (line.empty() || line.starts_with("```")) return;
        if (section == 0) {
            objective_lines.push_back(line);
            return;
        }
        line = trim(std::regex_replace(line, numbering, "", std::regex_constants::format_first_only));
        if (line.empty() || std::regex_match(line, none_marker)) return;
        (section == 1 ? desc.preconditions : desc.expected_results).push_back(line);
    };

    std::istringstream in{std::string(text)};
    std::string line;
    bool seen_objective = false;
    while (std::getline(in, line)) {
        std::smatch m;
        if (std::regex_match(line, m, header)) {
            std::string name = m[1].str();
            std::transform(name.begin(), name.end(), name.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            section = name.starts_with("objective") ? 0 : name.starts_with("pre") ? 1 : 2;
            seen_objective = seen_objective || section == 0;
            add(m[2].str());
            continue;
        }
        if (section >= 0) add(line);
    }
    if (!seen_objective) return std::nullopt;
    for (const auto& l : objective_lines) {
        if (!desc.objective.empty()) desc.objective += ' ';
        desc.objective += l;
    }
    if (desc.objective.empty()) return std::nullopt;
    return desc;
}

nlohmann::json to_json(const ValidationIntention& desc) {
    return {{"objective", desc.objective},
            {"preconditions", desc.preconditions},
            {"expected_results", desc.expected_results}};
}

ValidationIntention intention_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("objective") || !j["objective"].is_string())
        throw IndexIntegrityError("intention lacks a string objective");
    ValidationIntention desc;
    desc.objective = j["objective"].get<std::string>();
    if (trim(desc.objective).empty()) throw IndexIntegrityError("intention objective is empty");
    auto list = [&](const char* key) {
        std::vector<std::string> out;
        if (!j.contains(key) || j[key].is_null()) return out;
        if (!j[key].is_array()) throw IndexIntegrityError(std::string(key) + " must be an array");
        for (const auto& item : j[key]) {
            if (!item.is_string()) throw IndexIntegrityError(std::string(key) + " items must be strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    };
    desc.preconditions = list("preconditions");
    desc.expected_results = list("expected_results");
    return desc;
}

std::string CrucialFact::key() const {
    if (const auto* n = std::get_if<NodeFact>(&subject)) return n->node;
    const auto& e = std::get<EdgeFact>(subject).edge;
    return e.src + " -" + std::string(to_string(e.kind)) + "-> " + e.dst;
}

// ---------------------------------------------------------------------------
// Outcomes and traces

nlohmann::json to_json(const GenerationOutcome& outcome, bool include_trace) {
    nlohmann::json j{{"status", std::string(to_string(outcome.status))},
                     {"test_text", outcome.test_text},
                     {"outer_iterations", outcome.outer_iterations},
                     {"refine_rounds", outcome.refine_rounds}};
    if (outcome.aborted) j["aborted"] = *outcome.aborted;
    if (include_trace) {
        auto& arr = j["trace"] = nlohmann::json::array();
        for (const auto& r : outcome.trace) arr.push_back({{"stage", r.stage}, {"data", r.data}});
    }
    return j;
}

std::string trace_to_jsonl(const std::vector<TraceRecord>& trace) {
    std::string out;
    for (const auto& r : trace) {
        nlohmann::json line{{"stage", r.stage}, {"data", r.data}};
        out += line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

std::vector<TraceRecord> trace_from_jsonl(std::string_view text) {
    std::vector<TraceRecord> trace;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            trace.push_back({j.at("stage").get<std::string>(), j.at("data")});
        } catch (const nlohmann::json::exception& e) {
            throw IndexReadError(std::string("malformed trace line: ") + e.what());
        }
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Index persistence

namespace {

nlohmann::json node_json(const EntityNode& n) {
    return {{"id", n.id},
            {"kind", std::string(to_string(n.kind))},
            {"simple_name", n.simple_name},
            {"signature", n.signature},
            {"file_path", n.file_path},
            {"span", {{"start_line", n.span.start_line}, {"end_line", n.span.end_line}}},
            {"body_text", n.body_text},
            {"annotations", n.annotations}};
}

EntityNode node_from_json(const nlohmann::json& j) {
    EntityNode n;
    n.id = j.at("id").get<std::string>();
    n.kind = parse_node_kind(j.at("kind").get<std::string>());
    n.simple_name = j.at("simple_name").get<std::string>();
    n.signature = j.at("signature").get<std::string>();
    n.file_path = j.at("file_path").get<std::string>();
    n.span.start_line = j.at("span").at("start_line").get<int>();
    n.span.end_line = j.at("span").at("end_line").get<int>();
    n.body_text = j.at("body_text").get<std::string>();
    n.annotations = j.at("annotations").get<std::vector<std::string>>();
    return n;
}

}  // namespace

std::string graph_to_json_text(const CodeGraph& graph) {
    nlohmann::json j;
    j["project_root"] = graph.project_root();
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (const auto& n : graph.nodes()) nodes.push_back(node_json(n));
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& e : graph.edges())
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"kind", std::string(to_string(e.kind))}});
    return dump(j);
}

std::string pairs_to_json_text(const std::vector<MethodTestPair>& pairs) {
    auto sorted = pairs;
    std::sort(sorted.begin(), sorted.end(), [](const MethodTestPair& a, const MethodTestPair& b) {
        return std::tie(a.test, a.focal) < std::tie(b.test, b.focal);
    });
    auto arr = nlohmann::json::array();
    for (const auto& p : sorted)
        arr.push_back({{"focal", p.focal}, {"test", p.test}, {"desc", to_json(p.desc)}});
    return dump(arr);
}

void save_index(const CodeGraph& graph, const std::vector<MethodTestPair>& pairs,
                const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IndexWriteError("cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "graph.json", graph_to_json_text(graph));
    write_file(dir / "pairs.json", pairs_to_json_text(pairs));
}

std::pair<CodeGraph, std::vector<MethodTestPair>> load_index(const std::filesystem::path& dir) {
    auto gj = read_json_file(dir / "graph.json");
    auto pj = read_json_file(dir / "pairs.json");

    std::vector<EntityNode> nodes;
    std::vector<RelationEdge> edges;
    std::string root;
    try {
        root = gj.at("project_root").get<std::string>();
        for (const auto& n : gj.at("nodes")) nodes.push_back(node_from_json(n));
        for (const auto& e : gj.at("edges"))
            edges.push_back({e.at("src").get<std::string>(), e.at("dst").get<std::string>(),
                             parse_edge_kind(e.at("kind").get<std::string>())});
    } catch (const nlohmann::json::exception& e) {
        throw IndexReadError(std::string("graph.json: ") + e.what());
    }
    CodeGraph graph(std::move(nodes), std::move(edges), std::move(root));

    std::vector<MethodTestPair> pairs;
    try {
        if (!pj.is_array()) throw IndexReadError("pairs.json: expected an array");
        for (const auto& p : pj) {
            MethodTestPair pair{p.at("focal").get<std::string>(), p.at("test").get<std::string>(),
                                intention_from_json(p.at("desc"))};
            const auto* focal = graph.find(pair.focal);
            const auto* test = graph.find(pair.test);
            if (!focal || !test)
                throw IndexIntegrityError("pair references unknown node: " + pair.focal + " / " +
                                          pair.test);
            if (pair.focal == pair.test || !is_callable(focal->kind) ||
                test->kind != NodeKind::Method || test->annotations.empty())
                throw IndexIntegrityError("invalid pair " + pair.focal + " / " + pair.test);
            pairs.push_back(std::move(pair));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IndexReadError(std::string("pairs.json: ") + e.what());
    }
    return {std::move(graph), std::move(pairs)};
}

}  // namespace intentforge
