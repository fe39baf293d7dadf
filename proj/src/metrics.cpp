#include "intentforge/metrics.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "intentforge/error.hpp"

namespace intentforge::metrics {

namespace pt = boost::property_tree;

namespace {

pt::ptree parse_xml(std::string_view xml) {
    std::istringstream in{std::string(xml)};
    pt::ptree tree;
    try {
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw ReportParseError(std::string("malformed XML: ") + e.what());
    }
    return tree;
}

bool is_markup(const std::string& key) { return key == "<xmlattr>" || key == "<xmlcomment>"; }

template <typename T>
T child_value(const pt::ptree& node, const std::string& key, const char* element) {
    auto child = node.get_child_optional(key);
    if (!child) throw ReportParseError(std::string(element) + " lacks <" + key + ">");
    try {
        return child->get_value<T>();
    } catch (const pt::ptree_bad_data&) {
        throw ReportParseError(std::string(element) + " has an invalid <" + key + ">");
    }
}

int int_attr(const pt::ptree& node, const std::string& name, const char* element) {
    auto v = node.get_optional<std::string>("<xmlattr>." + name);
    if (!v) throw ReportParseError(std::string(element) + " lacks attribute " + name);
    try {
        std::size_t used = 0;
        int n = std::stoi(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return n;
    } catch (const std::exception&) {
        throw ReportParseError(std::string(element) + " has a non-integer " + name + ": " + *v);
    }
}

}  // namespace

MutationReport parse_mutation_report(std::string_view xml) {
    auto tree = parse_xml(xml);
    auto root = tree.get_child_optional("mutations");
    if (!root || tree.size() != 1) throw ReportParseError("expected a single <mutations> root element");
    MutationReport report;
    for (const auto& [key, node] : *root) {
        if (is_markup(key)) continue;
        if (key != "mutation") throw ReportParseError("unexpected element <" + key + "> in <mutations>");
        auto detected = node.get_optional<std::string>("<xmlattr>.detected");
        if (!detected || (*detected != "true" && *detected != "false"))
            throw ReportParseError("<mutation> needs detected=\"true|false\"");
        MutantId id{child_value<std::string>(node, "mutatedClass", "<mutation>"),
                    child_value<std::string>(node, "mutatedMethod", "<mutation>"),
                    child_value<int>(node, "lineNumber", "<mutation>"),
                    child_value<std::string>(node, "mutator", "<mutation>"),
                    child_value<int>(node, "index", "<mutation>")};
        (*detected == "true" ? report.killed : report.survived).insert(std::move(id));
    }
    for (const auto& k : report.killed) report.survived.erase(k);
    return report;
}

double cms(const MutantSet& g, const MutantSet& t) {
    if (g.empty() && t.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& m : g) common += t.count(m);
    return static_cast<double>(common) / static_cast<double>(g.size() + t.size() - common);
}

double cms_aggregate(const std::vector<double>& per_test) {
    if (per_test.empty()) throw EmptyAggregateError("no per-test scores to aggregate");
    return std::accumulate(per_test.begin(), per_test.end(), 0.0) / static_cast<double>(per_test.size());
}

PairedMeans paired_subsets(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    PairedMeans out;
    double sum_a = 0, sum_b = 0;
    for (const auto& [key, value] : a) {
        auto it = b.find(key);
        if (it == b.end()) continue;
        sum_a += value;
        sum_b += it->second;
        ++out.aligned;
    }
    if (out.aligned) {
        out.a = sum_a / static_cast<double>(out.aligned);
        out.b = sum_b / static_cast<double>(out.aligned);
    }
    return out;
}

CoverageProfile parse_coverage_report(std::string_view xml, const EntityNode& focal) {
    auto tree = parse_xml(xml);
    auto root = tree.get_child_optional("report");
    if (!root) throw ReportParseError("expected a <report> root element");

    const auto& path = focal.file_path;
    auto matches = [&](const std::string& package, const std::string& file) {
        auto rel = package.empty() ? file : package + "/" + file;
        return path == rel ||
               (path.size() > rel.size() && path.compare(path.size() - rel.size(), rel.size(), rel) == 0 &&
                path[path.size() - rel.size() - 1] == '/');
    };

    CoverageProfile profile;
    bool found = false;
    auto read_sourcefile = [&](const pt::ptree& sf, const std::string& package) {
        auto name = sf.get_optional<std::string>("<xmlattr>.name");
        if (!name) throw ReportParseError("<sourcefile> lacks attribute name");
        bool mine = matches(package, *name);
        for (const auto& [key, node] : sf) {
            if (key != "line") continue;
            int nr = int_attr(node, "nr", "<line>");
            int ci = int_attr(node, "ci", "<line>");
            if (mine && ci > 0 && nr >= focal.span.start_line && nr <= focal.span.end_line) profile.lines.insert(nr);
        }
        found = found || mine;
    };
    for (const auto& [key, node] : *root) {
        if (key == "package") {
            auto name = node.get<std::string>("<xmlattr>.name", "");
            for (const auto& [inner_key, inner] : node)
                if (inner_key == "sourcefile") read_sourcefile(inner, name);
        } else if (key == "sourcefile") {
            read_sourcefile(node, "");
        }
    }
    if (!found) throw MissingCoverageError("coverage report has no section for " + path);
    return profile;
}

std::string_view to_string(CoverageRelation r) {
    switch (r) {
        case CoverageRelation::ExactMatch: return "ExactMatch";
        case CoverageRelation::FullCover: return "FullCover";
        case CoverageRelation::Partial: return "Partial";
        case CoverageRelation::Disjoint: return "Disjoint";
    }
    return "Disjoint";
}

CoverageRelation coverage_relation(const CoverageProfile& gen, const CoverageProfile& truth) {
    if (gen.lines == truth.lines) return CoverageRelation::ExactMatch;
    if (std::includes(gen.lines.begin(), gen.lines.end(), truth.lines.begin(), truth.lines.end()))
        return CoverageRelation::FullCover;
    for (int l : gen.lines)
        if (truth.lines.count(l)) return CoverageRelation::Partial;
    return CoverageRelation::Disjoint;
}

std::array<double, 4> percentages(const std::array<std::size_t, 4>& counts) {
    std::array<double, 4> out{};
    const auto total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (total == 0) return out;
    // Work in hundredths of a percent: 10000 units per row.
    std::array<std::size_t, 4> units{};
    std::array<std::size_t, 4> remainders{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        units[i] = counts[i] * 10000 / total;
        remainders[i] = counts[i] * 10000 % total;
        assigned += units[i];
    }
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return remainders[x] > remainders[y]; });
    for (std::size_t k = 0; assigned < 10000; ++k, ++assigned) ++units[order[k % 4]];
    for (std::size_t i = 0; i < 4; ++i) out[i] = static_cast<double>(units[i]) / 100.0;
    return out;
}

Breakdown aggregate_outcomes(const std::vector<LabeledOutcome>& outcomes) {
    Breakdown b;
    auto add = [](BreakdownRow& row, OutcomeStatus s) {
        auto idx = static_cast<std::size_t>(std::find(kStatuses.begin(), kStatuses.end(), s) - kStatuses.begin());
        ++row.counts[idx];
        ++row.total;
    };
    for (const auto& o : outcomes) {
        add(b.per_project[o.project], o.status);
        add(b.overall, o.status);
    }
    for (auto& [_, row] : b.per_project) row.percentages = percentages(row.counts);
    b.overall.percentages = percentages(b.overall.counts);
    return b;
}

nlohmann::json to_json(const Breakdown& breakdown) {
    auto row_json = [](const BreakdownRow& row) {
        nlohmann::json counts, pct;
        for (std::size_t i = 0; i < 4; ++i) {
            counts[std::string(to_string(kStatuses[i]))] = row.counts[i];
            pct[std::string(to_string(kStatuses[i]))] = row.percentages[i];
        }
        return nlohmann::json{{"total", row.total}, {"counts", counts}, {"percentages", pct}};
    };
    nlohmann::json projects = nlohmann::json::object();
    for (const auto& [name, row] : breakdown.per_project) projects[name] = row_json(row);
    return {{"overall", row_json(breakdown.overall)}, {"per_project", projects}};
}

}  // namespace intentforge::metrics
