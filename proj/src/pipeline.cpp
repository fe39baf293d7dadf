#include "intentforge/pipeline.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "intentforge/error.hpp"
#include "intentforge/source.hpp"

namespace intentforge::pipeline {

namespace fs = std::filesystem;

std::string_view to_string(Phase phase) {
    return phase == Phase::Compile ? "compile" : "execute";
}

nlohmann::json to_json(const RunnerResult& r) {
    return {{"phase", to_string(r.phase)}, {"exit_code", r.exit_code},   {"stdout", r.stdout_text},
            {"stderr", r.stderr_text},     {"duration", r.duration},     {"timed_out", r.timed_out}};
}

// --- subprocess ----------------------------------------------------------------

namespace {

struct Pipe {
    int fd[2] = {-1, -1};
    Pipe() {
        if (::pipe2(fd, O_CLOEXEC) != 0) throw RunnerConfigError("cannot create pipe");
    }
    ~Pipe() {
        for (int f : fd)
            if (f >= 0) ::close(f);
    }
    void close_end(int i) {
        if (fd[i] >= 0) ::close(fd[i]);
        fd[i] = -1;
    }
};

}  // namespace

RunnerResult run_command(const std::string& command, const fs::path& cwd, double timeout_seconds,
                         Phase phase) {
    RunnerResult result;
    result.phase = phase;
    Pipe out, err;
    const std::string dir = cwd.string();
    const auto start = std::chrono::steady_clock::now();

    pid_t pid = ::fork();
    if (pid < 0) throw RunnerConfigError("fork failed");
    if (pid == 0) {
        ::setpgid(0, 0);
        if (!dir.empty() && ::chdir(dir.c_str()) != 0) ::_exit(127);
        ::dup2(out.fd[1], STDOUT_FILENO);
        ::dup2(err.fd[1], STDERR_FILENO);
        int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    out.close_end(1);
    err.close_end(1);

    const auto deadline = start + std::chrono::duration<double>(timeout_seconds);
    pollfd fds[2] = {{out.fd[0], POLLIN, 0}, {err.fd[0], POLLIN, 0}};
    std::string* sinks[2] = {&result.stdout_text, &result.stderr_text};
    int open_streams = 2;
    char buf[8192];
    while (open_streams > 0) {
        int wait_ms = -1;
        if (!result.timed_out) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline -
                                                                              std::chrono::steady_clock::now());
            if (left.count() <= 0) {
                result.timed_out = true;
                ::kill(-pid, SIGKILL);
                continue;
            }
            wait_ms = static_cast<int>(std::min<long long>(left.count(), 1000 * 60));
        }
        int n = ::poll(fds, 2, wait_ms);
        if (n < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            ssize_t got = ::read(fds[i].fd, buf, sizeof buf);
            if (got > 0) {
                sinks[i]->append(buf, static_cast<std::size_t>(got));
            } else if (got == 0 || errno != EINTR) {
                fds[i].fd = -1;
                --open_streams;
            }
        }
    }
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    if (!result.timed_out && result.exit_code == 127)
        throw RunnerConfigError("command not found or not executable: " + command +
                                (result.stderr_text.empty() ? "" : " (" + result.stderr_text + ")"));
    return result;
}

std::string substitute(std::string_view tmpl, const std::string& project_root, const std::string& test_file,
                       const std::string& test_class) {
    static const std::pair<std::string_view, int> keys[] = {
        {"{project_root}", 0}, {"{test_file}", 1}, {"{test_class}", 2}};
    const std::string* values[] = {&project_root, &test_file, &test_class};
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        bool matched = false;
        for (const auto& [key, idx] : keys) {
            if (tmpl.substr(i, key.size()) == key) {
                out += *values[idx];
                i += key.size();
                matched = true;
                break;
            }
        }
        if (!matched) out += tmpl[i++];
    }
    return out;
}

TestLocation locate_test(std::string_view test_code, std::string_view test_source_dir) {
    static const std::regex package_re(R"((^|\n)\s*package\s+([\w.]+)\s*;)");
    static const std::regex public_class_re(R"(public\s+(?:(?:final|abstract)\s+)*class\s+(\w+))");
    static const std::regex class_re(R"((?:^|\s)class\s+(\w+))");
    const std::string code(test_code);
    std::smatch m;
    std::string package;
    if (std::regex_search(code, m, package_re)) package = m[2].str();
    std::string cls;
    if (std::regex_search(code, m, public_class_re) || std::regex_search(code, m, class_re)) cls = m[1].str();
    if (cls.empty()) throw MalformedOutputError("generated test declares no class");

    std::string rel(test_source_dir);
    while (!rel.empty() && rel.back() == '/') rel.pop_back();
    std::string pkg_dir = package;
    std::replace(pkg_dir.begin(), pkg_dir.end(), '.', '/');
    for (const auto& part : {pkg_dir, cls + ".java"}) {
        if (part.empty()) continue;
        if (!rel.empty()) rel += '/';
        rel += part;
    }
    return {rel, package.empty() ? cls : package + "." + cls};
}

RunnerResult run_phase(const fs::path& project_root, std::string_view command_template, const TestLocation& test,
                       double timeout_seconds, Phase phase) {
    const auto root = fs::absolute(project_root).lexically_normal();
    auto command =
        substitute(command_template, root.string(), (root / test.relative_path).string(), test.qualified_class);
    return run_command(command, root, timeout_seconds, phase);
}

// --- shell runner --------------------------------------------------------------

namespace {

std::optional<std::string> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw RunnerConfigError("cannot write test file " + p.string());
}

// Puts a file in place and undoes it (including created directories) on scope
// exit.
class WorkspaceFile {
public:
    WorkspaceFile(const fs::path& root, const fs::path& path, const std::string& text) : path_(path) {
        for (auto dir = path.parent_path(); !fs::exists(dir) && dir != root && dir.has_relative_path();
             dir = dir.parent_path())
            created_dirs_.push_back(dir);
        fs::create_directories(path.parent_path());
        if (fs::exists(path)) backup_ = read_file(path);
        write_file(path, text);
    }
    ~WorkspaceFile() {
        std::error_code ec;
        if (backup_) {
            std::ofstream(path_, std::ios::binary | std::ios::trunc) << *backup_;
        } else {
            fs::remove(path_, ec);
        }
        for (const auto& dir : created_dirs_) fs::remove(dir, ec);  // only succeeds when empty
    }
    WorkspaceFile(const WorkspaceFile&) = delete;
    WorkspaceFile& operator=(const WorkspaceFile&) = delete;

private:
    fs::path path_;
    std::optional<std::string> backup_;
    std::vector<fs::path> created_dirs_;  // deepest first
};

}  // namespace

ShellRunner::ShellRunner(ShellRunnerConfig config) : config_(std::move(config)) {
    if (config_.compile_cmd.empty() || config_.test_cmd.empty())
        throw RunnerConfigError("compile_cmd and test_cmd must both be configured");
    if (!fs::is_directory(config_.project_root))
        throw RunnerConfigError("project root " + config_.project_root.string() + " is not a directory");
    config_.project_root = fs::absolute(config_.project_root).lexically_normal();
}

RunOutput ShellRunner::run(const std::string& test_code) {
    auto location = locate_test(test_code, config_.test_source_dir);
    WorkspaceFile file(config_.project_root, config_.project_root / location.relative_path, test_code);
    RunOutput out;
    out.test_file = location.relative_path;
    out.compile = run_phase(config_.project_root, config_.compile_cmd, location, config_.compile_timeout,
                            Phase::Compile);
    if (out.compile.succeeded())
        out.execute = run_phase(config_.project_root, config_.test_cmd, location, config_.execute_timeout,
                                Phase::Execute);
    return out;
}

// --- error extraction ----------------------------------------------------------

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

const std::regex& compiler_re() {
    static const std::regex re(R"(^(\S[^:]*\.java):(\d+):\s?(.*)$)");
    return re;
}
const std::regex& maven_re() {
    static const std::regex re(R"(^\[(?:ERROR|WARNING)\]\s+(\S[^:]*\.java):\[(\d+)(?:,\d+)?\]\s?(.*)$)");
    return re;
}
const std::regex& trace_header_re() {
    static const std::regex re(
        R"(^(?:Exception in thread "[^"]*" )?(?:Caused by: )?(?:[A-Za-z_$][\w$]*\.)+[A-Za-z_$][\w$]*(?:Exception|Error|Throwable|Failure|Failures)[\w$]*(?::.*)?$)");
    return re;
}
const std::regex& frame_re() {
    static const std::regex re(R"(^\s+at\s+([^\s(]+)\(([^)]*)\)\s*$)");
    return re;
}
const std::regex& more_re() {
    static const std::regex re(R"(^\s+\.\.\. \d+ more$)");
    return re;
}
const std::regex& summary_re() {
    static const std::regex re(R"(^\d+ (?:error|warning)s?$)");
    return re;
}

bool starts_record(const std::string& line) {
    return std::regex_match(line, compiler_re()) || std::regex_match(line, maven_re()) ||
           std::regex_match(line, trace_header_re());
}

bool within(const fs::path& root, const fs::path& p) {
    auto rel = p.lexically_relative(root);
    return !rel.empty() && *rel.begin() != "..";
}

struct SourceIndex {
    std::vector<std::string> files;  // project-relative, '/' separated

    SourceIndex(const fs::path& root, const std::vector<std::string>& extra) : files(extra) {
        std::error_code ec;
        for (fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec), end;
             !ec && it != end; it.increment(ec)) {
            const auto name = it->path().filename().string();
            if (it->is_directory() && !name.empty() && name[0] == '.') {
                it.disable_recursion_pending();
                continue;
            }
            if (it->is_regular_file() && it->path().extension() == ".java")
                files.push_back(it->path().lexically_relative(root).generic_string());
        }
    }

    // `pkg.Outer$Inner.method` in `Outer.java` → any file ending in pkg/Outer.java.
    bool contains_frame(const std::string& method, const std::string& location) const {
        auto colon = location.find(':');
        auto file = location.substr(0, colon);
        if (file.size() < 6 || file.substr(file.size() - 5) != ".java") return false;
        auto qualified = method.substr(method.rfind('/') == std::string::npos ? 0 : method.rfind('/') + 1);
        auto cls_end = qualified.rfind('.');
        if (cls_end == std::string::npos) return false;
        auto cls = qualified.substr(0, cls_end);
        auto pkg_end = cls.rfind('.');
        std::string suffix = file;
        if (pkg_end != std::string::npos) {
            auto pkg = cls.substr(0, pkg_end);
            std::replace(pkg.begin(), pkg.end(), '.', '/');
            suffix = pkg + "/" + file;
        }
        return std::any_of(files.begin(), files.end(), [&](const std::string& f) {
            return f == suffix || (f.size() > suffix.size() && f.compare(f.size() - suffix.size(), suffix.size(), suffix) == 0 &&
                                   f[f.size() - suffix.size() - 1] == '/');
        });
    }
};

std::string relativize(std::string text, const std::string& root_prefix) {
    for (auto pos = text.find(root_prefix); pos != std::string::npos; pos = text.find(root_prefix, pos))
        text.erase(pos, root_prefix.size());
    return text;
}

}  // namespace

std::vector<std::string> extract_errors(const RunnerResult& result, const fs::path& project_root,
                                        const std::vector<std::string>& extra_sources) {
    const auto root = fs::weakly_canonical(fs::absolute(project_root));
    const auto root_prefix = root.generic_string() + "/";
    std::optional<SourceIndex> sources;
    auto lines = split_lines(result.stdout_text);
    for (auto& l : split_lines(result.stderr_text)) lines.push_back(std::move(l));

    auto path_inside = [&](const std::string& path) {
        fs::path p(path);
        if (p.is_relative()) p = root / p;
        return within(root, p.lexically_normal());
    };

    std::vector<std::string> records;
    std::size_t i = 0;
    while (i < lines.size()) {
        const auto& line = lines[i];
        std::smatch m;
        if (std::regex_match(line, m, compiler_re())) {
            bool keep = path_inside(m[1].str());
            std::string record = line;
            for (++i; i < lines.size(); ++i) {
                const auto& next = lines[i];
                if (next.empty() || starts_record(next) || std::regex_match(next, summary_re()) ||
                    next.rfind("[", 0) == 0)
                    break;
                record += "\n" + next;
            }
            if (keep) records.push_back(relativize(record, root_prefix));
        } else if (std::regex_match(line, m, maven_re())) {
            if (path_inside(m[1].str())) records.push_back(relativize(line, root_prefix));
            ++i;
        } else if (std::regex_match(line, trace_header_re())) {
            if (!sources) sources.emplace(root, extra_sources);
            std::string record = line;
            bool any_frame = false;
            for (++i; i < lines.size(); ++i) {
                const auto& next = lines[i];
                std::smatch f;
                if (std::regex_match(next, f, frame_re())) {
                    if (sources->contains_frame(f[1].str(), f[2].str())) {
                        record += "\n" + next;
                        any_frame = true;
                    }
                } else if (std::regex_match(next, more_re())) {
                    continue;
                } else if (next.rfind("Caused by: ", 0) == 0) {
                    record += "\n" + next;
                } else {
                    break;
                }
            }
            if (any_frame) records.push_back(relativize(record, root_prefix));
        } else {
            ++i;
        }
    }
    std::vector<std::string> unique;
    for (auto& r : records)
        if (std::find(unique.begin(), unique.end(), r) == unique.end()) unique.push_back(std::move(r));
    return unique;
}

// --- classification ------------------------------------------------------------

const std::vector<std::string>& default_assertion_markers() {
    static const std::vector<std::string> markers{
        "AssertionFailedError", "AssertionError", "ComparisonFailure", "MultipleFailuresError",
        "expected:.*but was:"};
    return markers;
}

OutcomeStatus classify(const RunnerResult& compile, const std::optional<RunnerResult>& execute,
                       const std::vector<std::string>& assertion_markers) {
    if (!compile.succeeded() || !execute) return OutcomeStatus::CompilationFailure;
    if (execute->timed_out) return OutcomeStatus::ExecutionFailure;
    if (execute->exit_code == 0) return OutcomeStatus::Pass;
    const auto output = execute->stdout_text + "\n" + execute->stderr_text;
    for (const auto& marker : assertion_markers)
        if (std::regex_search(output, std::regex(marker))) return OutcomeStatus::AssertionFailure;
    return OutcomeStatus::ExecutionFailure;
}

// --- generation ----------------------------------------------------------------

std::set<NodeId> held_out_tests(const std::vector<MethodTestPair>& pairs, std::string_view focal) {
    std::set<NodeId> out;
    for (const auto& p : pairs)
        if (p.focal == focal) out.insert(p.test);
    return out;
}

namespace {

const char* kMalformedMessage =
    "The response did not contain a fenced Java code block starting with a package declaration.";

nlohmann::json config_json(const GenerationConfig& c) {
    nlohmann::json ablations = nlohmann::json::array();
    for (auto a : c.ablations) ablations.push_back(prompt::to_string(a));
    return {{"alpha", c.alpha},
            {"beta", c.rank.beta},
            {"top_k", c.rank.top_k},
            {"depth", c.depth},
            {"max_outer", c.max_outer},
            {"max_refine", c.max_refine},
            {"granularity", prompt::to_string(c.granularity)},
            {"ablations", ablations},
            {"model", c.model_id},
            {"temperature", c.temperature}};
}

class Generation {
public:
    Generation(const GenerationTask& task, const GenerationContext& ctx) : task_(task), ctx_(ctx) {}

    GenerationOutcome run() {
        const auto& cfg = task_.config;
        if (cfg.max_outer < 1 || cfg.max_refine < 0) throw ConfigError("iteration caps must be positive");
        const auto& focal = ctx_.graph.at(task_.focal);
        held_out_ = held_out_tests(ctx_.pairs, task_.focal);
        for (const auto& p : ctx_.pairs)
            if (!held_out_.count(p.test) && p.test != task_.focal) corpus_.push_back(p);

        nlohmann::json held = nlohmann::json::array();
        for (const auto& t : held_out_) held.push_back(t);
        record("task", {{"focal", task_.focal},
                        {"desc", to_json(task_.desc_tar)},
                        {"held_out", held},
                        {"config", config_json(cfg)}});

        rank_references(focal);
        usages_ = source::extract_usages(ctx_.graph, task_.focal, held_out_);
        nlohmann::json usage_json = nlohmann::json::array();
        for (const auto& u : usages_)
            usage_json.push_back({{"enclosing_method", u.enclosing_method}, {"call_count", u.call_count}});
        record("usages", {{"usages", usage_json}});

        skeleton_ = source::file_skeleton(ctx_.graph, focal.file_path);

        try {
            for (int r = 0; r < cfg.max_outer; ++r) {
                outcome_.outer_iterations = r + 1;
                outcome_.refine_rounds = 0;
                if (outer_iteration(r, focal)) break;
                if (cfg.dry_run) break;
            }
        } catch (const ProviderError& e) {
            abort_with(e);
        } catch (const ReplayMissError& e) {
            abort_with(e);
        }
        nlohmann::json final_json{{"status", to_string(outcome_.status)},
                                  {"outer_iterations", outcome_.outer_iterations},
                                  {"refine_rounds", outcome_.refine_rounds}};
        if (outcome_.aborted) final_json["aborted"] = *outcome_.aborted;
        record("outcome", final_json);
        return std::move(outcome_);
    }

private:
    void record(std::string stage, nlohmann::json data) {
        outcome_.trace.push_back({std::move(stage), std::move(data)});
    }

    void abort_with(const Error& e) {
        outcome_.aborted = e.kind() + ": " + e.what();
        record("aborted", {{"kind", e.kind()}, {"message", e.what()}});
    }

    void rank_references(const EntityNode& focal) {
        if (task_.config.ablations.count(prompt::Ablation::NoRef)) {
            record("retrieval", {{"skipped", "no-ref"}});
            return;
        }
        if (corpus_.empty()) {
            record("retrieval", {{"skipped", "empty corpus"}});
            return;
        }
        ranking_ = retrieval::ref_score(focal.body_text, task_.desc_tar, corpus_, ctx_.graph, task_.config.alpha,
                                        ctx_.embedder);
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& s : ranking_)
            rows.push_back({{"test", s.pair->test},
                            {"focal", s.pair->focal},
                            {"code_sim", s.code_sim},
                            {"desc_sim", s.desc_sim},
                            {"ref", s.ref}});
        record("retrieval", {{"ranking", rows}});
    }

    const std::vector<CrucialFact>& facts_for(const std::optional<NodeId>& ref, int outer) {
        auto key = ref.value_or("");
        auto it = facts_cache_.find(key);
        if (it == facts_cache_.end()) {
            auto seed = discriminator::make_seed(ctx_.graph, task_.focal, ref);
            auto candidates = discriminator::explore(ctx_.graph, seed, task_.config.depth, held_out_);
            auto scored = candidates.empty()
                              ? std::vector<CrucialFact>{}
                              : discriminator::score_facts(candidates, task_.desc_tar, usages_, ctx_.embedder,
                                                           ctx_.graph, task_.config.rank);
            it = facts_cache_.emplace(key, std::move(scored)).first;
        }
        nlohmann::json table = nlohmann::json::array();
        for (const auto& f : it->second) table.push_back(discriminator::to_json(f));
        nlohmann::json seed_json = nlohmann::json::array();
        for (const auto& n : discriminator::make_seed(ctx_.graph, task_.focal, ref).nodes) seed_json.push_back(n);
        record("facts", {{"outer", outer}, {"seed", seed_json}, {"candidates", table}});
        return it->second;
    }

    std::string framework_for(const std::optional<NodeId>& ref) {
        if (!task_.config.framework_version.empty()) return task_.config.framework_version;
        std::optional<std::string> file;
        if (ref)
            file = ctx_.graph.at(*ref).file_path;
        else if (!corpus_.empty())
            file = ctx_.graph.at(corpus_.front().test).file_path;
        return file ? source::framework_version(ctx_.graph, *file) : std::string();
    }

    std::string complete(const prompt::PromptBundle& bundle, int outer, int round) {
        llm::CompletionRequest request{bundle.system, bundle.user, task_.config.temperature, task_.config.model_id,
                                       task_.config.max_output_tokens};
        record("prompt", {{"outer", outer},
                          {"round", round},
                          {"label", prompt::to_string(bundle.label)},
                          {"system", bundle.system ? nlohmann::json(*bundle.system) : nlohmann::json(nullptr)},
                          {"user", bundle.user},
                          {"hash", llm::request_hash(request)}});
        if (task_.config.dry_run) return {};
        auto response = ctx_.llm.complete(request);
        record("response", {{"outer", outer}, {"round", round}, {"text", response}});
        return response;
    }

    // True when the test passed.
    bool outer_iteration(int r, const EntityNode& focal) {
        const auto& cfg = task_.config;
        const int outer = r + 1;
        std::optional<NodeId> ref;
        prompt::EditInputs in;
        if (!ranking_.empty()) {
            const auto& chosen = ranking_[static_cast<std::size_t>(r) % ranking_.size()];
            ref = chosen.pair->test;
            in.reference_test = ctx_.graph.at(*ref).body_text;
            record("reference", {{"outer", outer},
                                 {"rank", r % ranking_.size() + 1},
                                 {"test", *ref},
                                 {"ref", chosen.ref}});
        }
        if (!cfg.ablations.count(prompt::Ablation::NoFact)) {
            const auto& facts = facts_for(ref, outer);
            for (std::size_t k = 0; k < facts.size() && k < cfg.rank.top_k; ++k)
                in.facts.push_back(discriminator::render_fact(facts[k], ctx_.graph));
        }
        in.focal_code = focal.body_text;
        in.skeleton = skeleton_;
        in.framework_version = framework_for(ref);
        in.desc = task_.desc_tar;
        in.granularity = cfg.granularity;
        in.ablations = cfg.ablations;
        in.system = cfg.system_prompt;
        const auto edit = prompt::render_edit_prompt(in);

        auto response = complete(edit, outer, 0);
        if (cfg.dry_run) {
            outcome_.aborted = "dry run: no provider contacted";
            return false;
        }
        for (int round = 0;; ++round) {
            outcome_.refine_rounds = round;
            std::string test;
            std::vector<std::string> errors;
            try {
                test = prompt::extract_test_code(response);
            } catch (const MalformedOutputError& e) {
                record("extract", {{"outer", outer}, {"round", round}, {"error", e.what()}});
                errors.push_back(kMalformedMessage);
            }
            if (errors.empty()) {
                outcome_.test_text = test;
                RunOutput run;
                try {
                    run = ctx_.runner.run(test);
                } catch (const MalformedOutputError& e) {
                    record("extract", {{"outer", outer}, {"round", round}, {"error", e.what()}});
                    errors.push_back(e.what());
                }
                if (errors.empty()) {
                    outcome_.status = classify(run.compile, run.execute, cfg.assertion_markers);
                    const auto& last = run.execute ? *run.execute : run.compile;
                    std::vector<std::string> extra;
                    if (!run.test_file.empty()) extra.push_back(run.test_file);
                    errors = extract_errors(last, ctx_.graph.project_root(), extra);
                    nlohmann::json runner_json{{"outer", outer}, {"round", round}, {"compile", to_json(run.compile)}};
                    if (run.execute) runner_json["execute"] = to_json(*run.execute);
                    record("runner", runner_json);
                    record("classification", {{"outer", outer},
                                              {"round", round},
                                              {"status", to_string(outcome_.status)},
                                              {"errors", errors}});
                    if (outcome_.status == OutcomeStatus::Pass) return true;
                }
            }
            if (round >= cfg.max_refine) return false;
            const auto refine = prompt::render_refine_prompt(edit, test.empty() ? response : test, errors);
            response = complete(refine, outer, round + 1);
        }
    }

    const GenerationTask& task_;
    const GenerationContext& ctx_;
    GenerationOutcome outcome_;
    std::set<NodeId> held_out_;
    std::vector<MethodTestPair> corpus_;
    std::vector<retrieval::RefScore> ranking_;
    std::vector<source::Usage> usages_;
    std::string skeleton_;
    std::map<NodeId, std::vector<CrucialFact>> facts_cache_;
};

}  // namespace

GenerationOutcome generate(const GenerationTask& task, const GenerationContext& ctx) {
    return Generation(task, ctx).run();
}

}  // namespace intentforge::pipeline
