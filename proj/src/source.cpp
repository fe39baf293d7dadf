#include "intentforge/source.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "intentforge/error.hpp"

namespace intentforge::source {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<std::string> read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return buffer.str();
}

std::string parent_dir(std::string_view file) {
    auto slash = file.rfind('/');
    return slash == std::string_view::npos ? std::string() : std::string(file.substr(0, slash));
}

// Parameter count of a rendered callable signature; commas inside generic
// arguments do not separate parameters.
std::pair<int, bool> parameter_shape(std::string_view signature) {
    auto open = signature.find('(');
    auto close = signature.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close <= open + 1)
        return {0, false};
    auto params = signature.substr(open + 1, close - open - 1);
    int count = 1, depth = 0;
    for (char c : params) {
        if (c == '<') ++depth;
        else if (c == '>') --depth;
        else if (c == ',' && depth == 0) ++count;
    }
    bool varargs = params.size() >= 3 && params.substr(params.size() - 3) == "...";
    return {count, varargs};
}

struct PendingType {
    NodeId id;
    std::string file;
    NodeKind kind;
    std::vector<std::string> extends;
    std::vector<std::string> implements;
};

struct PendingCallable {
    NodeId id;
    NodeId owner;
    NodeKind kind;
    std::string name;
    std::vector<std::string> param_types;
    std::vector<java::CallSite> calls;
    std::string file;
};

class GraphBuilder {
public:
    explicit GraphBuilder(std::vector<std::string>* warnings) : warnings_(warnings) {}

    void add_file(const std::string& path, const java::ParsedFile& parsed) {
        for (const auto& type : parsed.types) add_type(path, type, std::nullopt);
    }

    CodeGraph finish(std::string project_root) {
        std::vector<RelationEdge> edges = structural_edges_;

        for (const auto& t : types_) {
            for (const auto& name : t.extends)
                for (const auto& target : resolve_type(name, t.file, t.kind))
                    if (target != t.id) edges.push_back({t.id, target, EdgeKind::Extend});
            for (const auto& name : t.implements)
                for (const auto& target : resolve_type(name, t.file, NodeKind::Interface))
                    if (t.kind == NodeKind::Class) edges.push_back({t.id, target, EdgeKind::Implement});
        }
        for (const auto& c : callables_)
            for (const auto& p : c.param_types)
                for (const auto& ident : java::type_identifiers(p))
                    for (const auto& target : resolve_type(ident, c.file, std::nullopt))
                        edges.push_back({c.id, target, EdgeKind::Param});

        // Overloads: same declaring type, same kind and name; the later
        // declaration points at the earlier one.
        for (std::size_t i = 0; i < callables_.size(); ++i)
            for (std::size_t j = i + 1; j < callables_.size(); ++j) {
                const auto& a = callables_[i];
                const auto& b = callables_[j];
                if (a.owner == b.owner && a.kind == b.kind && a.name == b.name)
                    edges.push_back({b.id, a.id, EdgeKind::Overload});
            }

        CodeGraph structural(nodes_, edges, project_root);
        CallResolver resolver(structural);
        for (const auto& c : callables_)
            for (const auto& call : c.calls)
                for (const auto& target : resolver.resolve(call, c.id))
                    edges.push_back({c.id, target, EdgeKind::Call});
        return CodeGraph(std::move(nodes_), std::move(edges), std::move(project_root));
    }

private:
    bool add_node(EntityNode node) {
        if (!ids_.insert(node.id).second) {
            if (warnings_) warnings_->push_back("duplicate declaration skipped: " + node.id);
            return false;
        }
        nodes_.push_back(std::move(node));
        return true;
    }

    void add_type(const std::string& file, const java::ParsedType& type,
                  std::optional<NodeId> outer) {
        EntityNode node;
        node.id = file + "#" + type.path;
        node.kind = type.kind;
        node.simple_name = type.name;
        node.signature = type.keyword + " " + type.path;
        node.file_path = file;
        node.span = type.span;
        node.annotations = type.annotations;
        const NodeId type_id = node.id;
        if (!add_node(std::move(node))) return;
        if (outer) structural_edges_.push_back({*outer, type_id, EdgeKind::Define});
        types_.push_back({type_id, file, type.kind, type.extends, type.implements});
        simple_types_[type.name].push_back(type_id);

        for (const auto& m : type.members) {
            using Kind = java::ParsedMember::Kind;
            switch (m.kind) {
                case Kind::Type:
                    for (const auto& inner : m.nested) add_type(file, inner, type_id);
                    break;
                case Kind::EnumConstants:
                    for (std::size_t i = 0; i < m.constant_names.size(); ++i) {
                        EntityNode f;
                        f.id = type_id + "." + m.constant_names[i];
                        f.kind = NodeKind::Field;
                        f.simple_name = m.constant_names[i];
                        f.signature = type.name + " " + m.constant_names[i];
                        f.file_path = file;
                        f.span = m.constant_spans[i];
                        add_member(std::move(f), type_id);
                    }
                    break;
                case Kind::Field: {
                    EntityNode f;
                    f.id = type_id + "." + m.name;
                    f.kind = NodeKind::Field;
                    f.simple_name = m.name;
                    f.signature = m.signature;
                    f.file_path = file;
                    f.span = m.span;
                    f.annotations = m.annotations;
                    add_member(std::move(f), type_id);
                    break;
                }
                case Kind::Method:
                case Kind::Constructor: {
                    EntityNode c;
                    c.kind = m.kind == Kind::Method ? NodeKind::Method : NodeKind::Constructor;
                    c.simple_name = m.name;
                    c.signature = m.signature;
                    c.id = type_id + "." + c.short_signature();
                    c.file_path = file;
                    c.span = m.span;
                    c.body_text = m.body_text;
                    c.annotations = m.annotations;
                    NodeId id = c.id;
                    auto kind = c.kind;
                    if (add_member(std::move(c), type_id))
                        callables_.push_back({id, type_id, kind, m.name, m.param_types, m.calls, file});
                    break;
                }
            }
        }
    }

    bool add_member(EntityNode node, const NodeId& owner) {
        NodeId id = node.id;
        if (!add_node(std::move(node))) return false;
        structural_edges_.push_back({owner, id, EdgeKind::Define});
        return true;
    }

    // Project types named `name`, preferring the referencing file, then its
    // directory, then anywhere.
    std::vector<NodeId> resolve_type(const std::string& type_text, const std::string& file,
                                     std::optional<NodeKind> kind) const {
        auto name = java::raw_type_name(type_text);
        auto it = simple_types_.find(name);
        if (it == simple_types_.end()) return {};
        std::vector<NodeId> all;
        for (const auto& id : it->second) {
            const auto& t = *std::find_if(types_.begin(), types_.end(),
                                          [&](const PendingType& p) { return p.id == id; });
            if (!kind || t.kind == *kind) all.push_back(id);
        }
        auto pick = [&](auto pred) {
            std::vector<NodeId> out;
            for (const auto& id : all)
                if (pred(id.substr(0, id.find('#')))) out.push_back(id);
            return out;
        };
        if (auto same = pick([&](const std::string& f) { return f == file; }); !same.empty())
            return same;
        auto dir = parent_dir(file);
        if (auto same = pick([&](const std::string& f) { return parent_dir(f) == dir; });
            !same.empty())
            return same;
        return all;
    }

    std::vector<std::string>* warnings_;
    std::vector<EntityNode> nodes_;
    std::set<NodeId> ids_;
    std::vector<RelationEdge> structural_edges_;
    std::vector<PendingType> types_;
    std::vector<PendingCallable> callables_;
    std::map<std::string, std::vector<NodeId>> simple_types_;
};

std::vector<std::pair<std::string, java::ParsedFile>> parse_all(
    const std::vector<std::pair<std::string, std::string>>& sources) {
    std::vector<std::pair<std::string, java::ParsedFile>> parsed(sources.size());
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < sources.size(); i += workers)
                parsed[i] = {sources[i].first, java::parse(sources[i].second)};
        }));
    for (auto& j : jobs) j.get();
    return parsed;
}

CodeGraph assemble(const std::vector<std::pair<std::string, std::string>>& sources,
                   std::string project_root, std::vector<std::string>* warnings) {
    GraphBuilder builder(warnings);
    for (const auto& [path, parsed] : parse_all(sources)) builder.add_file(path, parsed);
    return builder.finish(std::move(project_root));
}

std::string framework_from_imports(const std::vector<std::string>& imports) {
    std::string version;
    for (const auto& imp : imports) {
        if (imp.find("org.junit.jupiter") != std::string::npos) return "5";
        if (imp.find("org.junit.") != std::string::npos) version = "4";
        else if (version.empty() && imp.find("junit.framework") != std::string::npos) version = "3";
    }
    return version;
}

bool is_test_method(const EntityNode& n, const AdapterConfig& config) {
    if (n.kind != NodeKind::Method) return false;
    for (const auto& a : config.test_annotations)
        if (n.has_annotation(a)) return true;
    return false;
}

std::optional<NodeId> pair_with(const CodeGraph& graph, const CallResolver& resolver,
                                const TestCase& test, const AdapterConfig& config) {
    const auto& node = graph.at(test.node);
    auto production = [&](const EntityNode& n) {
        return is_callable(n.kind) && n.file_path != node.file_path && !is_test_method(n, config);
    };

    std::set<NodeId> called;
    for (auto e : graph.out_edges(node.id)) {
        const auto& edge = graph.edges()[e];
        if (edge.kind == EdgeKind::Call) called.insert(edge.dst);
    }

    // (1) name convention
    if (auto wanted = lower(focal_name_from_test(node.simple_name)); !wanted.empty()) {
        std::vector<NodeId> matches;
        for (const auto& n : graph.nodes())
            if (production(n) && lower(n.simple_name) == wanted) matches.push_back(n.id);
        std::vector<NodeId> called_matches;
        for (const auto& id : matches)
            if (called.count(id)) called_matches.push_back(id);
        if (!called_matches.empty()) matches = called_matches;
        if (matches.size() == 1) return matches.front();
    }

    auto assertion = [&](std::string_view name) {
        return std::any_of(config.assertion_name_prefixes.begin(),
                           config.assertion_name_prefixes.end(),
                           [&](const std::string& p) { return name.starts_with(p); });
    };
    auto calls = java::scan_calls(node.body_text);
    std::vector<std::vector<NodeId>> targets;
    for (const auto& call : calls) {
        std::vector<NodeId> t;
        for (auto& id : resolver.resolve(call, node.id))
            if (production(graph.at(id))) t.push_back(std::move(id));
        targets.push_back(std::move(t));
    }

    // (2) last non-assertion call
    for (std::size_t i = calls.size(); i-- > 0;)
        if (!assertion(calls[i].name) && !targets[i].empty()) return targets[i].front();

    // (3) most frequent call
    std::map<NodeId, int> frequency;
    for (const auto& t : targets)
        for (const auto& id : t) ++frequency[id];
    std::optional<NodeId> best;
    int best_count = 0;
    for (const auto& [id, count] : frequency)
        if (count > best_count) {
            best = id;
            best_count = count;
        }
    return best;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> list_source_files(const std::filesystem::path& root,
                                           const AdapterConfig& config) {
    namespace fs = std::filesystem;
    std::vector<std::string> dirs = config.source_dirs;
    dirs.insert(dirs.end(), config.test_dirs.begin(), config.test_dirs.end());
    if (dirs.empty()) dirs.push_back("");
    std::set<std::string> files;
    for (const auto& d : dirs) {
        fs::path base = d.empty() ? root : root / d;
        std::error_code ec;
        if (!fs::is_directory(base, ec)) continue;
        for (fs::recursive_directory_iterator it(base, fs::directory_options::skip_permission_denied, ec),
             end;
             it != end; it.increment(ec)) {
            if (ec) break;
            if (!it->is_regular_file(ec)) continue;
            auto ext = it->path().extension().string();
            if (std::find(config.file_extensions.begin(), config.file_extensions.end(), ext) ==
                config.file_extensions.end())
                continue;
            files.insert(fs::relative(it->path(), root, ec).generic_string());
        }
    }
    return {files.begin(), files.end()};
}

ParseReport parse_project(const std::filesystem::path& root, const AdapterConfig& config) {
    if (!std::filesystem::is_directory(root))
        throw SourceReadError("project root " + root.string() + " is not a directory");
    ParseReport report;
    std::vector<std::pair<std::string, std::string>> sources;
    for (const auto& rel : list_source_files(root, config)) {
        if (auto text = read_text(root / rel)) sources.emplace_back(rel, std::move(*text));
        else report.warnings.push_back("unreadable file skipped: " + rel);
    }
    if (sources.empty())
        throw EmptyProjectError("no parsable source files under " + root.string());
    report.graph = assemble(sources, root.generic_string(), &report.warnings);
    return report;
}

CodeGraph build_graph(const std::map<std::string, std::string>& files, std::string project_root) {
    std::vector<std::pair<std::string, std::string>> sources(files.begin(), files.end());
    if (sources.empty()) throw EmptyProjectError("no source files");
    return assemble(sources, std::move(project_root), nullptr);
}

// ---------------------------------------------------------------------------

CallResolver::CallResolver(const CodeGraph& graph) : graph_(graph) {
    for (const auto& n : graph.nodes()) {
        if (n.kind == NodeKind::Method) {
            auto [params, varargs] = parameter_shape(n.signature);
            methods_[n.simple_name].push_back({n.id, params, varargs});
        } else if (n.kind == NodeKind::Constructor) {
            if (const auto* owner = graph.owner_of(n.id)) {
                auto [params, varargs] = parameter_shape(n.signature);
                constructors_[owner->id].push_back({n.id, params, varargs});
            }
        } else if (n.kind == NodeKind::Class) {
            classes_[n.simple_name].push_back(n.id);
        }
    }
}

bool CallResolver::accepts(const Callable& c, int arity) {
    return c.params == arity || (c.varargs && arity >= c.params - 1);
}

std::vector<NodeId> CallResolver::resolve(const java::CallSite& call,
                                          std::string_view enclosing) const {
    std::vector<NodeId> out;
    auto constructors_of = [&](const NodeId& cls, bool implicit_default) {
        auto it = constructors_.find(cls);
        if (it == constructors_.end()) {
            if (implicit_default && call.arity == 0) out.push_back(cls);
            return;
        }
        for (const auto& c : it->second)
            if (accepts(c, call.arity)) out.push_back(c.id);
    };
    using Form = java::CallSite::Form;
    switch (call.form) {
        case Form::Plain:
            if (auto it = methods_.find(call.name); it != methods_.end())
                for (const auto& c : it->second)
                    if (accepts(c, call.arity)) out.push_back(c.id);
            break;
        case Form::New:
            if (auto it = classes_.find(call.name); it != classes_.end())
                for (const auto& cls : it->second) constructors_of(cls, true);
            break;
        case Form::This:
            if (const auto* owner = graph_.owner_of(enclosing)) constructors_of(owner->id, false);
            break;
        case Form::Super:
            if (const auto* owner = graph_.owner_of(enclosing))
                for (auto e : graph_.out_edges(owner->id))
                    if (graph_.edges()[e].kind == EdgeKind::Extend)
                        constructors_of(graph_.edges()[e].dst, false);
            break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------

std::string framework_version(const CodeGraph& graph, std::string_view file) {
    auto text = read_text(std::filesystem::path(graph.project_root()) / std::string(file));
    return text ? framework_from_imports(java::parse(*text).imports) : std::string();
}

std::vector<TestCase> discover_tests(const CodeGraph& graph, const AdapterConfig& config) {
    std::vector<TestCase> tests;
    std::map<std::string, std::string> versions;
    for (const auto& n : graph.nodes()) {
        if (!is_test_method(n, config)) continue;
        auto [it, inserted] = versions.try_emplace(n.file_path);
        if (inserted) {
            if (auto text = read_text(std::filesystem::path(graph.project_root()) / n.file_path))
                it->second = framework_from_imports(java::parse(*text).imports);
        }
        std::string version = it->second;
        for (const auto& a : n.annotations)
            if (a.starts_with("org.junit.jupiter")) version = "5";
            else if (version.empty() && a.starts_with("org.junit.")) version = "4";
        tests.push_back({n.id, n.file_path, version});
    }
    return tests;
}

std::string focal_name_from_test(std::string_view name) {
    std::string s(name);
    auto strip_prefix = [&](std::string_view p) {
        if (s.size() > p.size() && lower(s.substr(0, p.size())) == p &&
            (s[p.size()] == '_' || std::isupper(static_cast<unsigned char>(s[p.size()])))) {
            s.erase(0, p.size());
            if (!s.empty() && s[0] == '_') s.erase(0, 1);
            return true;
        }
        return false;
    };
    strip_prefix("test");
    for (std::string_view suffix : {"_test", "Tests", "Test"})
        if (s.size() > suffix.size() && s.ends_with(suffix)) {
            s.erase(s.size() - suffix.size());
            break;
        }
    if (auto us = s.find('_'); us != std::string::npos && us > 0) s.erase(us);
    return s;
}

std::optional<NodeId> pair_focal(const CodeGraph& graph, const TestCase& test,
                                 const AdapterConfig& config) {
    CallResolver resolver(graph);
    return pair_with(graph, resolver, test, config);
}

std::vector<std::optional<NodeId>> pair_all(const CodeGraph& graph,
                                            const std::vector<TestCase>& tests,
                                            const AdapterConfig& config) {
    CallResolver resolver(graph);
    std::vector<std::optional<NodeId>> out;
    out.reserve(tests.size());
    for (const auto& t : tests) out.push_back(pair_with(graph, resolver, t, config));
    return out;
}

std::vector<Usage> extract_usages(const CodeGraph& graph, std::string_view focal,
                                  const std::set<NodeId>& exclude) {
    graph.at(focal);
    CallResolver resolver(graph);
    std::set<NodeId> callers;
    for (auto e : graph.in_edges(focal)) {
        const auto& edge = graph.edges()[e];
        if (edge.kind == EdgeKind::Call && edge.src != focal && !exclude.count(edge.src))
            callers.insert(edge.src);
    }
    std::vector<Usage> usages;
    for (const auto& id : callers) {
        const auto& caller = graph.at(id);
        int count = 0;
        for (const auto& call : java::scan_calls(caller.body_text)) {
            auto targets = resolver.resolve(call, id);
            if (std::binary_search(targets.begin(), targets.end(), std::string(focal))) ++count;
        }
        usages.push_back({id, caller.body_text, std::max(count, 1)});
    }
    return usages;
}

// ---------------------------------------------------------------------------

namespace {

void render_type(const java::ParsedType& type, int depth, std::vector<std::string>& lines) {
    const std::string indent(static_cast<std::size_t>(depth) * 4, ' ');
    const std::string inner(static_cast<std::size_t>(depth + 1) * 4, ' ');
    std::vector<std::string> body;
    std::string last_decl;
    Span last_span{0, 0};
    for (const auto& m : type.members) {
        using Kind = java::ParsedMember::Kind;
        switch (m.kind) {
            case Kind::Field:
                if (m.decl_text.empty()) break;
                // Several declarators share one declaration.
                if (m.decl_text == last_decl && m.span == last_span) break;
                last_decl = m.decl_text;
                last_span = m.span;
                body.push_back(inner + m.decl_text);
                break;
            case Kind::EnumConstants:
                body.push_back(inner + m.decl_text);
                break;
            case Kind::Method:
            case Kind::Constructor:
                body.push_back(inner + m.header + (m.has_body ? " { ... }" : ";"));
                break;
            case Kind::Type:
                for (const auto& nested : m.nested) render_type(nested, depth + 1, body);
                break;
        }
    }
    if (body.empty()) {
        lines.push_back(indent + type.header + " { }");
        return;
    }
    lines.push_back(indent + type.header + " {");
    lines.insert(lines.end(), body.begin(), body.end());
    lines.push_back(indent + "}");
}

}  // namespace

std::string render_skeleton(const java::ParsedFile& parsed) {
    std::vector<std::string> lines;
    if (!parsed.package_line.empty()) {
        lines.push_back(parsed.package_line);
        lines.emplace_back();
    }
    for (const auto& imp : parsed.imports) lines.push_back(imp);
    if (!parsed.imports.empty()) lines.emplace_back();
    for (std::size_t i = 0; i < parsed.types.size(); ++i) {
        if (i) lines.emplace_back();
        render_type(parsed.types[i], 0, lines);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? "\n" : "") + lines[i];
    return out;
}

std::string file_skeleton(const CodeGraph& graph, std::string_view file) {
    if (graph.nodes_in_file(file).empty())
        throw UnknownEntityError("no entities declared in '" + std::string(file) + "'");
    auto text = read_text(std::filesystem::path(graph.project_root()) / std::string(file));
    if (!text) throw SourceReadError("cannot read " + std::string(file));
    return render_skeleton(java::parse(*text));
}

}  // namespace intentforge::source
