#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "intentforge/model.hpp"

namespace testing {

inline intentforge::EntityNode node(std::string id, intentforge::NodeKind kind,
                                    std::string name, std::string signature = {},
                                    std::string file = "Server.java", int start = 1,
                                    int end = 1, std::string body = {}) {
    intentforge::EntityNode n;
    n.id = std::move(id);
    n.kind = kind;
    n.simple_name = std::move(name);
    n.signature = signature.empty() ? n.simple_name : std::move(signature);
    n.file_path = std::move(file);
    n.span = {start, end};
    n.body_text = std::move(body);
    return n;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Fresh scratch directory below the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    auto dir = std::filesystem::temp_directory_path() /
               ("intentforge-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path fixture(const std::string& rel) {
    return std::filesystem::path(FIXTURE_DIR) / rel;
}

// Diamond: A calls B and C; C overloads B.
inline intentforge::CodeGraph diamond_graph() {
    using namespace intentforge;
    std::vector<EntityNode> nodes{
        node("F#A.a()", NodeKind::Method, "a", "void a()", "F", 1, 3),
        node("F#A.b()", NodeKind::Method, "b", "void b()", "F", 4, 5),
        node("F#A.b(int)", NodeKind::Method, "b", "void b(int)", "F", 6, 7),
        node("F#A", NodeKind::Class, "A", "class A", "F", 1, 8),
    };
    std::vector<RelationEdge> edges{
        {"F#A.a()", "F#A.b()", EdgeKind::Call},
        {"F#A.a()", "F#A.b(int)", EdgeKind::Call},
        {"F#A.b(int)", "F#A.b()", EdgeKind::Overload},
    };
    return CodeGraph(nodes, edges, "/proj");
}

}  // namespace testing
