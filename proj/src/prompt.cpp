#include "intentforge/prompt.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "intentforge/error.hpp"

namespace intentforge::prompt {

namespace {

// Verbatim from the published template, including its section-name mismatch.
constexpr std::string_view kInstruction =
    "Please generate ONE #Target Test Case# for #Target Focal Method# by strictly following "
    "#Target Test Case Description# and referring to #Referable Test Case# and #Relevant Project "
    "Information#.";
constexpr std::string_view kNote =
    "NOTE: #Crucial Project Knowledge# contains key facts about the project. These facts MUST be "
    "FULLY reflected in your generated #Target Test Case#.";
constexpr std::string_view kRequirements =
    "Your final output must contain only ONE test method annotated `@Test` and strictly adhere to "
    "the following format:\n"
    "1: Begin with the exact prefix: \"```package \".\n"
    "2: End with the exact suffix: \"```\".\n"
    "Ensure that no additional text appears before the prefix or after the suffix.";
constexpr std::string_view kRevision =
    "Please revise #Previously Generated Test# so that it compiles and passes, fixing the problems "
    "reported in #Error Messages#, while still strictly following #Target Test Case Description# "
    "and referring to #Referable Test Case# and #Relevant Project Information#.";

constexpr std::string_view kInstructionName = "Instruction";

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::size_t word_count(std::string_view s) {
    std::istringstream in{std::string(s)};
    std::size_t n = 0;
    for (std::string w; in >> w;) ++n;
    return n;
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

void collect_words(std::string_view text, std::set<std::string>& out) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (!word_char(text[i])) {
            ++i;
            continue;
        }
        auto j = i;
        while (j < text.size() && word_char(text[j])) ++j;
        out.emplace(text.substr(i, j - i));
        i = j;
    }
}

std::string numbered(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += "\n";
        auto prefix = std::to_string(i + 1) + ". ";
        std::string indent(prefix.size(), ' ');
        std::istringstream lines(items[i]);
        std::string line;
        bool first = true;
        while (std::getline(lines, line)) {
            out += first ? prefix + line : "\n" + indent + line;
            first = false;
        }
        if (first) out += prefix;
    }
    return out;
}

IntentionSections sections_for(Granularity g) {
    switch (g) {
        case Granularity::Obj: return {true, false, false};
        case Granularity::ObjPre: return {true, true, false};
        case Granularity::ObjExp: return {true, false, true};
        default: return {true, true, true};
    }
}

}  // namespace

std::string_view to_string(Label label) {
    switch (label) {
        case Label::Edit: return "Edit";
        case Label::Refine: return "Refine";
        case Label::IntentionSynthesis: return "IntentionSynthesis";
    }
    return "?";
}

std::string_view to_string(Granularity g) {
    switch (g) {
        case Granularity::Full: return "full";
        case Granularity::Obj: return "obj";
        case Granularity::ObjPre: return "objpre";
        case Granularity::ObjExp: return "objexp";
        case Granularity::None: return "none";
    }
    return "?";
}

std::string_view to_string(Ablation a) { return a == Ablation::NoRef ? "no-ref" : "no-fact"; }

std::optional<Granularity> parse_granularity(std::string_view text) {
    auto t = lower(text);
    for (auto g : {Granularity::Full, Granularity::Obj, Granularity::ObjPre, Granularity::ObjExp, Granularity::None})
        if (t == to_string(g)) return g;
    return std::nullopt;
}

std::optional<Ablation> parse_ablation(std::string_view text) {
    auto t = lower(text);
    std::replace(t.begin(), t.end(), '_', '-');
    if (t == "no-ref" || t == "noref") return Ablation::NoRef;
    if (t == "no-fact" || t == "nofact") return Ablation::NoFact;
    return std::nullopt;
}

std::string_view to_string(Violation v) {
    switch (v) {
        case Violation::ObjectiveTooLong: return "ObjectiveTooLong";
        case Violation::PreExpTooLong: return "PreExpTooLong";
        case Violation::RatioTooHigh: return "RatioTooHigh";
    }
    return "?";
}

std::string render_sections(const std::vector<Section>& sections) {
    std::string out;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        if (i) out += "\n\n";
        out += "#" + sections[i].name + ":\n" + sections[i].body;
    }
    out += "\n";
    return out;
}

PromptBundle render_edit_prompt(const EditInputs& in) {
    std::vector<Section> s;
    s.push_back({"Target Focal Method", in.focal_code});
    s.push_back({"Target Focal Method Context", in.skeleton});
    const auto junit = in.framework_version.empty() ? std::string("JUnit") : "JUnit " + in.framework_version;
    s.push_back({"Target Test Case", "// A " + junit + " test case to be generated"});
    if (in.granularity != Granularity::None)
        s.push_back({"Target Validation Intention Desc", render_intention(in.desc, sections_for(in.granularity))});
    if (!in.ablations.count(Ablation::NoRef)) s.push_back({"Referable Test Case", in.reference_test});
    if (!in.ablations.count(Ablation::NoFact)) s.push_back({"Crucial Project Knowledge", numbered(in.facts)});
    s.push_back({std::string(kInstructionName), std::string(kInstruction) + "\n" + std::string(kNote)});
    s.push_back({"Requirements", std::string(kRequirements)});
    return {in.system, render_sections(s), Label::Edit, s};
}

PromptBundle render_refine_prompt(const PromptBundle& edit_prompt, const std::string& previous_test,
                                  const std::vector<std::string>& errors) {
    std::vector<Section> s;
    std::string joined;
    for (const auto& e : errors) joined += (joined.empty() ? "" : "\n") + e;
    for (const auto& sec : edit_prompt.sections) {
        if (sec.name == "Previously Generated Test" || sec.name == "Error Messages") continue;
        if (sec.name == kInstructionName) {
            s.push_back({"Previously Generated Test", previous_test});
            s.push_back({"Error Messages", errors.empty() ? "(none captured)" : joined});
            s.push_back({sec.name, std::string(kRevision) + "\n" + std::string(kNote)});
        } else {
            s.push_back(sec);
        }
    }
    return {edit_prompt.system, render_sections(s), Label::Refine, s};
}

PromptBundle render_intention_prompt(std::string_view test_code, std::string_view focal_code,
                                     std::optional<std::string> system) {
    std::vector<Section> s;
    s.push_back({"Test Case", std::string(test_code)});
    s.push_back({"Focal Method", std::string(focal_code)});
    s.push_back({"Component Definitions",
                 "- Objective: the purpose of the test case, i.e. what behaviour of the test item it "
                 "is meant to validate.\n"
                 "- Preconditions: the state the test item and its environment must be in before the "
                 "test case runs, including the inputs supplied to the test item.\n"
                 "- Expected Results: the observable behaviour or output the test item is predicted to "
                 "produce when the test case runs under the preconditions."});
    s.push_back({"Instruction",
                 "Describe the validation intention of #Test Case# for #Focal Method# using the three "
                 "components in #Component Definitions#. The Objective section is mandatory; the "
                 "Preconditions and Expected Results sections are optional and may be omitted.\n"
                 "(1) \"objective\" is limited to 50 words;\n"
                 "(2) the combined length of \"preconditions\" and \"expected results\" is limited to "
                 "200 words;\n"
                 "(3) the description shall contain minimized program elements.\n"
                 "Enclose every program element you do mention in backticks."});
    s.push_back({"Output Format",
                 "# Objective:\n<one paragraph>\n# Preconditions:\n1. <item>\n# Expected Results:\n1. <item>"});
    return {std::move(system), render_sections(s), Label::IntentionSynthesis, s};
}

std::string extract_test_code(std::string_view output) {
    constexpr std::string_view fence = "```";
    std::size_t pos = output.find(fence);
    while (pos != std::string_view::npos) {
        const auto body_start = pos + fence.size();
        const auto close = output.find(fence, body_start);
        if (close == std::string_view::npos) break;
        auto body = output.substr(body_start, close - body_start);
        if (body.starts_with("java\n") || body.starts_with("java\r\n"))
            body.remove_prefix(body.find('\n') + 1);
        if (body.starts_with("package ")) {
            if (body.ends_with("\n")) body.remove_suffix(1);
            if (body.ends_with("\r")) body.remove_suffix(1);
            return std::string(body);
        }
        pos = output.find(fence, close + fence.size());
    }
    throw MalformedOutputError("no ``` block starting with \"package \" in model output");
}

IntentionConstraintReport check_intention(const ValidationIntention& desc, std::string_view test_code) {
    IntentionConstraintReport r;
    r.objective_words = word_count(desc.objective);
    for (const auto& p : desc.preconditions) r.pre_exp_words += word_count(p);
    for (const auto& e : desc.expected_results) r.pre_exp_words += word_count(e);

    const auto text = render_intention(desc);
    std::set<std::string> desc_elements, test_elements;
    for (auto open = text.find('`'); open != std::string::npos;) {
        auto close = text.find('`', open + 1);
        if (close == std::string::npos) break;
        collect_words(std::string_view(text).substr(open + 1, close - open - 1), desc_elements);
        open = text.find('`', close + 1);
    }
    collect_words(test_code, test_elements);
    r.element_count = desc_elements.size();
    std::size_t shared = 0;
    for (const auto& w : desc_elements) shared += test_elements.count(w);
    r.element_ratio = test_elements.empty() ? 0.0 : static_cast<double>(shared) / test_elements.size();

    if (r.objective_words > 50) r.violations.push_back(Violation::ObjectiveTooLong);
    if (r.pre_exp_words > 200) r.violations.push_back(Violation::PreExpTooLong);
    if (r.element_count > 3 && r.element_ratio >= 0.1) r.violations.push_back(Violation::RatioTooHigh);
    return r;
}

IntentionConstraintReport program_element_ratio(std::string_view desc_text, std::string_view test_code) {
    auto parsed = parse_intention(desc_text);
    return check_intention(parsed ? *parsed : ValidationIntention{std::string(desc_text), {}, {}}, test_code);
}

SynthesisResult synthesize_intention(llm::CompletionProvider& llm, std::string_view test_code,
                                     std::string_view focal_code, int max_attempts,
                                     const std::string& model_id, std::optional<std::string> system) {
    auto bundle = render_intention_prompt(test_code, focal_code, std::move(system));
    SynthesisResult result;
    std::string last_problem = "no attempts made";
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        result.attempts = attempt;
        // Repeating an identical request would replay the same answer, so
        // later attempts carry the previous rejection reason.
        auto user = bundle.user;
        if (attempt > 1) user += "\n#Previous Attempt Rejected:\n" + last_problem + "\n";
        llm::CompletionRequest req{bundle.system, user, 0.0, model_id, std::nullopt};
        auto reply = llm.complete(req);
        nlohmann::json record{{"label", "IntentionSynthesis"}, {"attempt", attempt}, {"user", user},
                              {"response", reply}};
        if (bundle.system) record["system"] = *bundle.system;
        auto parsed = parse_intention(reply);
        if (!parsed) {
            last_problem = "the output did not contain an Objective section";
        } else {
            auto report = check_intention(*parsed, test_code);
            record["objective_words"] = report.objective_words;
            record["pre_exp_words"] = report.pre_exp_words;
            record["element_ratio"] = report.element_ratio;
            record["element_count"] = report.element_count;
            if (report.violations.empty()) {
                record["accepted"] = true;
                result.trace.push_back({"intention", record});
                result.desc = *parsed;
                return result;
            }
            last_problem.clear();
            for (auto v : report.violations) {
                if (!last_problem.empty()) last_problem += ", ";
                last_problem += to_string(v);
            }
            record["violations"] = last_problem;
        }
        record["accepted"] = false;
        result.trace.push_back({"intention", record});
    }
    throw IntentionSynthesisError("no conforming description after " + std::to_string(max_attempts) +
                                  " attempts (last: " + last_problem + ")");
}

}  // namespace intentforge::prompt
