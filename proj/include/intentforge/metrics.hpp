#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "intentforge/model.hpp"

namespace intentforge::metrics {

struct MutantId {
    std::string mutated_class;
    std::string mutated_method;
    int line = 0;
    std::string mutator;
    int index = 0;
    auto operator<=>(const MutantId&) const = default;
};

using MutantSet = std::set<MutantId>;

struct MutationReport {
    MutantSet killed;
    MutantSet survived;
};

// PIT-style XML: <mutations> of <mutation detected="true|false"> elements.
// A mutant reported both detected and undetected counts as killed.
MutationReport parse_mutation_report(std::string_view xml);

// Jaccard index; two empty sets score 1.
double cms(const MutantSet& killed_g, const MutantSet& killed_t);

// Mean of per-test scores. Throws EmptyAggregateError on an empty list.
double cms_aggregate(const std::vector<double>& per_test);

struct PairedMeans {
    std::optional<double> a;
    std::optional<double> b;
    std::size_t aligned = 0;
};

// Means of both maps over their common keys only.
PairedMeans paired_subsets(const std::map<std::string, double>& results_a,
                           const std::map<std::string, double>& results_b);

struct CoverageProfile {
    std::set<int> lines;
    bool operator==(const CoverageProfile&) const = default;
};

// JaCoCo-style XML: <line nr ci> under <sourcefile> (optionally inside
// <package>). Keeps covered lines inside the focal's span. Throws
// ReportParseError or MissingCoverageError.
CoverageProfile parse_coverage_report(std::string_view xml, const EntityNode& focal);

enum class CoverageRelation { ExactMatch, FullCover, Partial, Disjoint };
std::string_view to_string(CoverageRelation r);

CoverageRelation coverage_relation(const CoverageProfile& gen, const CoverageProfile& truth);

// Exact matches also satisfy full coverage.
inline bool covers_fully(CoverageRelation r) {
    return r == CoverageRelation::ExactMatch || r == CoverageRelation::FullCover;
}

struct LabeledOutcome {
    std::string project;
    OutcomeStatus status = OutcomeStatus::CompilationFailure;
};

constexpr std::array<OutcomeStatus, 4> kStatuses{OutcomeStatus::CompilationFailure, OutcomeStatus::ExecutionFailure,
                                                 OutcomeStatus::AssertionFailure, OutcomeStatus::Pass};

struct BreakdownRow {
    std::size_t total = 0;
    std::array<std::size_t, 4> counts{};   // in kStatuses order
    std::array<double, 4> percentages{};  // two decimals, summing to exactly 100 when total > 0
};

struct Breakdown {
    std::map<std::string, BreakdownRow> per_project;
    BreakdownRow overall;
};

// Rounds count shares to hundredths of a percent with the largest-remainder
// method so the row sums to 100.
std::array<double, 4> percentages(const std::array<std::size_t, 4>& counts);

Breakdown aggregate_outcomes(const std::vector<LabeledOutcome>& outcomes);

nlohmann::json to_json(const Breakdown& breakdown);

}  // namespace intentforge::metrics
