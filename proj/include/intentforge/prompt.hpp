#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "intentforge/llm.hpp"
#include "intentforge/model.hpp"

namespace intentforge::prompt {

enum class Label { Edit, Refine, IntentionSynthesis };
enum class Granularity { Full, Obj, ObjPre, ObjExp, None };
enum class Ablation { NoRef, NoFact };

std::string_view to_string(Label label);
std::string_view to_string(Granularity g);
std::string_view to_string(Ablation a);
// Accept `full|obj|objpre|objexp|none` and `no-ref|no-fact` (case-insensitive).
std::optional<Granularity> parse_granularity(std::string_view text);
std::optional<Ablation> parse_ablation(std::string_view text);

struct Section {
    std::string name;  // rendered as `#<name>:`
    std::string body;
    bool operator==(const Section&) const = default;
};

struct PromptBundle {
    std::optional<std::string> system;
    std::string user;
    Label label = Label::Edit;
    std::vector<Section> sections;  // the parts `user` was rendered from
};

// Sections separated by blank lines, each `#Name:` on its own line followed by
// its body.
std::string render_sections(const std::vector<Section>& sections);

struct EditInputs {
    std::string focal_code;
    std::string skeleton;
    std::string framework_version;  // e.g. "5"; empty renders a bare "JUnit"
    ValidationIntention desc;
    std::string reference_test;
    std::vector<std::string> facts;  // rendered facts, best first
    Granularity granularity = Granularity::Full;
    std::set<Ablation> ablations;
    std::optional<std::string> system;
};

PromptBundle render_edit_prompt(const EditInputs& in);

PromptBundle render_refine_prompt(const PromptBundle& edit_prompt, const std::string& previous_test,
                                  const std::vector<std::string>& errors);

PromptBundle render_intention_prompt(std::string_view test_code, std::string_view focal_code,
                                     std::optional<std::string> system = std::nullopt);

// The body of the first ``` block whose content starts with `package `
// (optionally after a `java` info line). One newline before the closing fence
// is dropped. Throws MalformedOutputError.
std::string extract_test_code(std::string_view output);

enum class Violation { ObjectiveTooLong, PreExpTooLong, RatioTooHigh };
std::string_view to_string(Violation v);

struct IntentionConstraintReport {
    std::size_t objective_words = 0;
    std::size_t pre_exp_words = 0;
    double element_ratio = 0;
    std::size_t element_count = 0;
    std::vector<Violation> violations;
};

// Word limits and program-element ratio of an intention against its test.
IntentionConstraintReport check_intention(const ValidationIntention& desc, std::string_view test_code);

// Same check on rendered description text.
IntentionConstraintReport program_element_ratio(std::string_view desc_text, std::string_view test_code);

struct SynthesisResult {
    ValidationIntention desc;
    int attempts = 0;
    std::vector<TraceRecord> trace;
};

// Prompts until a parsable description satisfies every constraint. Throws
// IntentionSynthesisError after `max_attempts`.
SynthesisResult synthesize_intention(llm::CompletionProvider& llm, std::string_view test_code,
                                     std::string_view focal_code, int max_attempts,
                                     const std::string& model_id = {},
                                     std::optional<std::string> system = std::nullopt);

}  // namespace intentforge::prompt
