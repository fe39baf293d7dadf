#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "intentforge/java_parser.hpp"
#include "intentforge/model.hpp"

namespace intentforge::source {

struct AdapterConfig {
    std::vector<std::string> source_dirs;  // empty: the project root
    std::vector<std::string> test_dirs;
    std::vector<std::string> file_extensions{".java"};
    std::vector<std::string> test_annotations{"Test"};
    std::vector<std::string> assertion_name_prefixes{"assert", "verify", "fail"};
};

struct ParseReport {
    CodeGraph graph;
    std::vector<std::string> warnings;
};

// Builds the code graph of a project. Unreadable files are skipped with a
// warning; a project without any readable source file is an error.
ParseReport parse_project(const std::filesystem::path& root, const AdapterConfig& config);

// Builds a graph from in-memory sources keyed by project-relative path.
CodeGraph build_graph(const std::map<std::string, std::string>& files, std::string project_root);

struct Usage {
    NodeId enclosing_method;
    std::string text;
    int call_count = 0;
    bool operator==(const Usage&) const = default;
};

struct TestCase {
    NodeId node;
    std::string class_file;
    std::string framework_version;  // "5", "4", "3", or empty when unknown
    bool operator==(const TestCase&) const = default;
};

// JUnit major version from a file's imports: "5", "4", "3" or empty.
std::string framework_version(const CodeGraph& graph, std::string_view file);

std::vector<TestCase> discover_tests(const CodeGraph& graph, const AdapterConfig& config = {});

// Resolves call sites against a graph by simple name and arity.
class CallResolver {
public:
    explicit CallResolver(const CodeGraph& graph);

    // In-project targets of `call` made from inside `enclosing`.
    std::vector<NodeId> resolve(const java::CallSite& call, std::string_view enclosing) const;

private:
    struct Callable {
        NodeId id;
        int params = 0;
        bool varargs = false;
    };
    static bool accepts(const Callable& c, int arity);

    const CodeGraph& graph_;
    std::map<std::string, std::vector<Callable>, std::less<>> methods_;
    std::map<std::string, std::vector<NodeId>, std::less<>> classes_;
    std::map<NodeId, std::vector<Callable>, std::less<>> constructors_;  // by class id
};

std::optional<NodeId> pair_focal(const CodeGraph& graph, const TestCase& test,
                                 const AdapterConfig& config = {});

// pair_focal over many tests, sharing one resolver.
std::vector<std::optional<NodeId>> pair_all(const CodeGraph& graph,
                                            const std::vector<TestCase>& tests,
                                            const AdapterConfig& config = {});

std::vector<Usage> extract_usages(const CodeGraph& graph, std::string_view focal,
                                  const std::set<NodeId>& exclude = {});

// Package and imports verbatim, type headers, fields verbatim, callables with
// bodies elided to `{ ... }`. Reads the file below the graph's project root.
std::string file_skeleton(const CodeGraph& graph, std::string_view file);
std::string render_skeleton(const java::ParsedFile& parsed);

// Splits a test method name into the candidate focal name, e.g.
// `testCreate` -> `create`, `create_withThreadPool` -> `create`.
std::string focal_name_from_test(std::string_view test_name);

// Source files (project-relative, sorted) that the adapter would index.
std::vector<std::string> list_source_files(const std::filesystem::path& root,
                                           const AdapterConfig& config);

}  // namespace intentforge::source
