#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "intentforge/discriminator.hpp"
#include "intentforge/llm.hpp"
#include "intentforge/model.hpp"
#include "intentforge/prompt.hpp"
#include "intentforge/retrieval.hpp"

namespace intentforge::pipeline {

enum class Phase { Compile, Execute };
std::string_view to_string(Phase phase);

struct RunnerResult {
    Phase phase = Phase::Compile;
    int exit_code = 0;
    std::string stdout_text;
    std::string stderr_text;
    double duration = 0;  // seconds
    bool timed_out = false;

    bool succeeded() const { return exit_code == 0 && !timed_out; }
};

nlohmann::json to_json(const RunnerResult& result);

// Runs `command` through /bin/sh in `cwd`, capturing both streams. The whole
// process group is killed once `timeout_seconds` elapse. Exit status 127
// (command not found) raises RunnerConfigError.
RunnerResult run_command(const std::string& command, const std::filesystem::path& cwd,
                         double timeout_seconds, Phase phase = Phase::Compile);

// Replaces `{project_root}`, `{test_file}` and `{test_class}`.
std::string substitute(std::string_view command_template, const std::string& project_root,
                       const std::string& test_file, const std::string& test_class);

// Where a test belongs: package path and public class name from its source.
struct TestLocation {
    std::string relative_path;  // below the project root
    std::string qualified_class;
};
TestLocation locate_test(std::string_view test_code, std::string_view test_source_dir);

// Substitutes the placeholders into `command_template` and runs it from the
// project root; the test file is expected to be in place already.
RunnerResult run_phase(const std::filesystem::path& project_root, std::string_view command_template,
                       const TestLocation& test, double timeout_seconds, Phase phase);

struct RunOutput {
    RunnerResult compile;
    std::optional<RunnerResult> execute;  // present iff compilation succeeded
    std::string test_file;                // project-relative
};

class TestRunner {
public:
    virtual ~TestRunner() = default;
    virtual RunOutput run(const std::string& test_code) = 0;
};

struct ShellRunnerConfig {
    std::filesystem::path project_root;
    std::string compile_cmd;
    std::string test_cmd;
    std::string test_source_dir = "src/test/java";
    double compile_timeout = 300;
    double execute_timeout = 120;
};

// Writes the test into the test source tree, compiles, executes, then restores
// whatever was at that path before.
class ShellRunner : public TestRunner {
public:
    explicit ShellRunner(ShellRunnerConfig config);
    RunOutput run(const std::string& test_code) override;

private:
    ShellRunnerConfig config_;
};

// Scripted runner for tests and dry runs.
class StubRunner : public TestRunner {
public:
    using Script = std::function<RunOutput(const std::string& test_code, int call)>;
    explicit StubRunner(Script script) : script_(std::move(script)) {}
    RunOutput run(const std::string& test_code) override { return script_(test_code, calls_++); }
    int calls() const { return calls_; }

private:
    Script script_;
    int calls_ = 0;
};

// Diagnostic records (compiler lines with their excerpt, stack traces with
// their frames) whose files lie inside the project, in order, deduplicated.
// Stack frames are matched against the project's source files; `extra_sources`
// names files that are part of the project but not on disk any more.
std::vector<std::string> extract_errors(const RunnerResult& result,
                                        const std::filesystem::path& project_root,
                                        const std::vector<std::string>& extra_sources = {});

const std::vector<std::string>& default_assertion_markers();

OutcomeStatus classify(const RunnerResult& compile, const std::optional<RunnerResult>& execute,
                       const std::vector<std::string>& assertion_markers = default_assertion_markers());

struct GenerationConfig {
    double alpha = 0.5;
    discriminator::RankOptions rank;
    int depth = 2;
    int max_outer = 5;
    int max_refine = 4;
    prompt::Granularity granularity = prompt::Granularity::Full;
    std::set<prompt::Ablation> ablations;
    std::string framework_version;  // empty: detect from the reference test
    std::string model_id;
    double temperature = 0;
    std::optional<int> max_output_tokens;
    std::optional<std::string> system_prompt;
    std::vector<std::string> assertion_markers = default_assertion_markers();
    bool dry_run = false;  // render the first edit prompt and stop
};

struct GenerationTask {
    NodeId focal;
    ValidationIntention desc_tar;
    GenerationConfig config;
};

struct GenerationContext {
    const CodeGraph& graph;
    const std::vector<MethodTestPair>& pairs;
    llm::CompletionProvider& llm;
    retrieval::EmbeddingProvider& embedder;
    TestRunner& runner;
};

// Tests paired with `focal` in the index; they are held out of every stage.
std::set<NodeId> held_out_tests(const std::vector<MethodTestPair>& pairs, std::string_view focal);

// Retrieve, discriminate, edit and refine until the test passes or the caps
// are reached. Each outer iteration advances to the next-ranked reference.
GenerationOutcome generate(const GenerationTask& task, const GenerationContext& ctx);

}  // namespace intentforge::pipeline
