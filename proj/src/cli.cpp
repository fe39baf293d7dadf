#include "intentforge/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "intentforge/config.hpp"
#include "intentforge/error.hpp"
#include "intentforge/llm.hpp"
#include "intentforge/metrics.hpp"
#include "intentforge/model.hpp"
#include "intentforge/pipeline.hpp"
#include "intentforge/prompt.hpp"
#include "intentforge/retrieval.hpp"
#include "intentforge/source.hpp"

namespace intentforge::cli {

namespace fs = std::filesystem;

std::string objective_from_test_name(const std::string& name) {
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) words.push_back(cur);
        cur.clear();
    };
    for (std::size_t i = 0; i < name.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(name[i]);
        if (c == '_' || c == '$') {
            flush();
        } else if (std::isupper(c)) {
            // Split camel humps, keeping acronyms together (`parseXMLFile` -> parse xml file).
            bool next_lower = i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1]));
            bool prev_upper = !cur.empty() && std::isupper(static_cast<unsigned char>(name[i - 1]));
            if (!prev_upper || next_lower) flush();
            cur += static_cast<char>(c);
        } else {
            cur += static_cast<char>(c);
        }
    }
    flush();
    if (!words.empty() && (words[0] == "test" || words[0] == "Test")) words.erase(words.begin());
    std::string text = "Tests";
    for (auto w : words) {
        std::transform(w.begin(), w.end(), w.begin(), [](unsigned char ch) { return std::tolower(ch); });
        text += " " + w;
    }
    if (words.empty()) text += " " + name;
    return text + ".";
}

namespace {

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw SourceReadError("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw IndexWriteError("cannot write " + p.string());
}

source::AdapterConfig adapter_config(const config::RunConfig& c) {
    source::AdapterConfig a;
    a.source_dirs = c.source_dirs;
    a.test_dirs = c.test_dirs;
    a.test_annotations = c.test_annotations;
    a.file_extensions = c.file_extensions;
    a.assertion_name_prefixes = c.assertion_name_prefixes;
    return a;
}

std::shared_ptr<llm::CompletionProvider> make_llm(const config::RunConfig& c) {
    auto http = [&] {
        llm::HttpProviderConfig h;
        h.endpoint = c.llm.endpoint;
        h.api_key_env = c.llm.api_key_env;
        h.auth_header = c.llm.auth_header;
        h.auth_prefix = c.llm.auth_prefix;
        h.response_path = c.llm.response_path;
        h.timeout_seconds = c.llm.timeout;
        h.max_retries = c.llm.retries;
        return std::make_shared<llm::HttpProvider>(h);
    };
    if (c.llm.provider == "replay") return std::make_shared<llm::ReplayProvider>(fs::path(c.llm.replay_dir));
    if (c.llm.provider == "record") return std::make_shared<llm::RecordingProvider>(http(), c.llm.replay_dir);
    return http();
}

std::shared_ptr<retrieval::EmbeddingProvider> make_embedder(const config::RunConfig& c, bool offline) {
    std::shared_ptr<retrieval::EmbeddingProvider> inner;
    if (c.embedding.provider == "http" && !offline) {
        retrieval::HttpEmbeddingConfig h;
        h.endpoint = c.embedding.endpoint;
        h.api_key_env = c.embedding.api_key_env;
        h.timeout_seconds = c.embedding.timeout;
        h.max_retries = c.embedding.retries;
        inner = std::make_shared<retrieval::HttpEmbeddingProvider>(h);
    } else {
        inner = std::make_shared<retrieval::HashEmbeddingProvider>(static_cast<std::size_t>(c.embedding.dim));
    }
    return std::make_shared<retrieval::CachingEmbeddingProvider>(inner);
}

class OfflineProvider : public llm::CompletionProvider {
public:
    std::string id() const override { return "offline"; }
    std::string complete(const llm::CompletionRequest&) override {
        throw ProviderError("no provider may be contacted in a dry run");
    }
};

std::string csv_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Options shared by the subcommands that feed config keys.
struct Overrides {
    config::Settings flags;
    void set(const std::string& key, const std::string& value) { flags[key] = value; }
};

// --- subcommands -------------------------------------------------------------

struct IndexArgs {
    std::string root, out;
};

int cmd_index(const IndexArgs& a, const config::RunConfig& c, std::ostream& out, std::ostream& err) {
    auto adapter = adapter_config(c);
    auto report = source::parse_project(a.root, adapter);
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    const auto& graph = report.graph;
    auto tests = source::discover_tests(graph, adapter);
    auto focals = source::pair_all(graph, tests, adapter);
    std::vector<MethodTestPair> pairs;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        if (!focals[i]) continue;
        ValidationIntention desc;
        desc.objective = objective_from_test_name(graph.at(tests[i].node).simple_name);
        pairs.push_back({*focals[i], tests[i].node, desc});
    }
    save_index(graph, pairs, a.out);
    out << "indexed " << graph.nodes().size() << " nodes, " << graph.edges().size() << " edges, " << tests.size()
        << " tests, " << pairs.size() << " method-test pairs into " << a.out << "\n";
    return kOk;
}

struct ReferabilityArgs {
    std::string index, out;
};

int cmd_referability(const ReferabilityArgs& a, const config::RunConfig& c, std::ostream& out) {
    auto [graph, pairs] = load_index(a.index);
    auto tests = source::discover_tests(graph, adapter_config(c));
    std::vector<retrieval::TokenizedDoc> docs;
    for (const auto& t : tests) docs.push_back(retrieval::tokenize_code(graph.at(t.node).body_text, t.node));
    auto rows = retrieval::referability_table(docs);
    std::string csv = "threshold,ra,rl\n";
    for (const auto& r : rows) {
        char th[8];
        std::snprintf(th, sizeof th, "%.1f", r.threshold);
        csv += std::string(th) + "," + csv_number(r.ra) + "," + csv_number(r.rl) + "\n";
    }
    write_text(a.out, csv);
    out << "referability over " << docs.size() << " tests written to " << a.out << "\n";
    return kOk;
}

struct DescribeArgs {
    std::string index, out, trace;
    std::vector<std::string> tests;
};

int cmd_describe(const DescribeArgs& a, const config::RunConfig& c, std::ostream& out, std::ostream& err) {
    auto [graph, pairs] = load_index(a.index);
    auto provider = make_llm(c);
    std::vector<TraceRecord> trace;
    int described = 0, failed = 0;
    for (auto& pair : pairs) {
        if (!a.tests.empty() && std::find(a.tests.begin(), a.tests.end(), pair.test) == a.tests.end()) continue;
        try {
            auto result = prompt::synthesize_intention(*provider, graph.at(pair.test).body_text,
                                                       graph.at(pair.focal).body_text, c.intention_attempts,
                                                       c.llm.model, c.llm.system_prompt);
            pair.desc = result.desc;
            for (auto& r : result.trace) {
                r.data["test"] = pair.test;
                trace.push_back(std::move(r));
            }
            ++described;
        } catch (const IntentionSynthesisError& e) {
            trace.push_back({"intention-failed", {{"test", pair.test}, {"message", e.what()}}});
            err << "warning: " << pair.test << ": " << e.what() << "\n";
            ++failed;
        }
    }
    const fs::path dest = a.out.empty() ? fs::path(a.index) : fs::path(a.out);
    save_index(graph, pairs, dest);
    write_text(a.trace.empty() ? dest / "describe.trace.jsonl" : fs::path(a.trace), trace_to_jsonl(trace));
    out << "described " << described << " tests";
    if (failed) out << ", " << failed << " failed";
    out << "\n";
    if (failed) throw IntentionSynthesisError(std::to_string(failed) + " test(s) could not be described");
    return kOk;
}

struct GenerateArgs {
    std::string index, focal, intention, out, trace;
    bool dry_run = false;
};

ValidationIntention load_intention(const fs::path& p) {
    auto text = read_text(p);
    auto start = text.find_first_not_of(" \t\r\n");
    if (start != std::string::npos && text[start] == '{') {
        try {
            return intention_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("intention file " + p.string() + " is not valid JSON: " + e.what());
        }
    }
    auto desc = parse_intention(text);
    if (!desc) throw ConfigError("intention file " + p.string() + " has no objective");
    return *desc;
}

int cmd_generate(const GenerateArgs& a, const config::RunConfig& c, std::ostream& out) {
    auto [graph, pairs] = load_index(a.index);
    graph.at(a.focal);  // unknown focal fails before anything runs

    pipeline::GenerationTask task;
    task.focal = a.focal;
    task.desc_tar = load_intention(a.intention);
    auto& g = task.config;
    g.alpha = c.alpha;
    g.rank.beta = c.beta;
    g.rank.top_k = static_cast<std::size_t>(c.top_k);
    g.rank.normalize_occurrence = c.normalize_occurrence;
    g.depth = c.depth;
    g.max_outer = c.max_outer;
    g.max_refine = c.max_refine;
    g.granularity = c.granularity;
    g.ablations = c.ablations;
    g.framework_version = c.framework_version;
    g.model_id = c.llm.model;
    g.temperature = c.temperature;
    g.max_output_tokens = c.llm.max_output_tokens;
    g.system_prompt = c.llm.system_prompt;
    if (!c.assertion_markers.empty()) g.assertion_markers = c.assertion_markers;
    g.dry_run = a.dry_run;

    std::shared_ptr<llm::CompletionProvider> provider;
    std::unique_ptr<pipeline::TestRunner> runner;
    if (a.dry_run) {
        provider = std::make_shared<OfflineProvider>();
        runner = std::make_unique<pipeline::StubRunner>([](const std::string&, int) -> pipeline::RunOutput {
            throw RunnerConfigError("nothing runs in a dry run");
        });
    } else {
        config::require_commands(c);
        provider = make_llm(c);
        pipeline::ShellRunnerConfig rc;
        rc.project_root = graph.project_root();
        rc.compile_cmd = c.compile_cmd;
        rc.test_cmd = c.test_cmd;
        rc.test_source_dir = c.test_source_dir;
        rc.compile_timeout = c.compile_timeout;
        rc.execute_timeout = c.execute_timeout;
        runner = std::make_unique<pipeline::ShellRunner>(rc);
    }
    auto embedder = make_embedder(c, a.dry_run);
    pipeline::GenerationContext ctx{graph, pairs, *provider, *embedder, *runner};
    auto outcome = pipeline::generate(task, ctx);

    auto j = to_json(outcome);
    j["focal"] = a.focal;
    j["project"] = fs::path(graph.project_root()).filename().string();
    write_text(a.out, j.dump(2) + "\n");
    write_text(a.trace.empty() ? a.out + ".trace.jsonl" : a.trace, trace_to_jsonl(outcome.trace));

    if (a.dry_run) {
        for (const auto& r : outcome.trace)
            if (r.stage == "prompt") out << r.data.at("user").get<std::string>();
        return kOk;
    }
    out << to_string(outcome.status) << " after " << outcome.outer_iterations << " iteration(s), "
        << outcome.refine_rounds << " refine round(s)\n";
    if (outcome.aborted) throw ProviderError("generation aborted: " + *outcome.aborted);
    return kOk;
}

struct EvaluateArgs {
    std::string outcomes, mutation_gen, mutation_truth, coverage_gen, coverage_truth, focal, index, baseline, out;
};

// A report file, or a directory of `<name>.xml` reports keyed by name.
std::map<std::string, fs::path> report_files(const std::string& path) {
    std::map<std::string, fs::path> out;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::directory_iterator(path))
            if (e.is_regular_file() && e.path().extension() == ".xml") out[e.path().stem().string()] = e.path();
    } else {
        out[fs::path(path).stem().string()] = path;
    }
    return out;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    nlohmann::json report{{"breakdown", nullptr},
                          {"cms", nullptr},
                          {"cms_pair", nullptr},
                          {"exact_match_rate", nullptr},
                          {"full_cover_rate", nullptr}};

    if (!a.outcomes.empty()) {
        std::vector<metrics::LabeledOutcome> outcomes;
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(a.outcomes))
            if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            try {
                auto j = nlohmann::json::parse(read_text(f));
                outcomes.push_back({j.value("project", std::string("default")),
                                    parse_outcome_status(j.at("status").get<std::string>())});
            } catch (const nlohmann::json::exception& e) {
                throw ReportParseError("outcome file " + f.string() + ": " + e.what());
            }
        }
        report["breakdown"] = metrics::to_json(metrics::aggregate_outcomes(outcomes));
    }

    if (!a.mutation_gen.empty()) {
        auto gen = report_files(a.mutation_gen);
        auto truth = report_files(a.mutation_truth);
        const bool single = gen.size() == 1 && truth.size() == 1 && !fs::is_directory(a.mutation_gen);
        std::map<std::string, double> per_test;
        for (const auto& [name, path] : gen) {
            auto t = single ? truth.begin() : truth.find(name);
            if (t == truth.end()) continue;
            auto g_report = metrics::parse_mutation_report(read_text(path));
            auto t_report = metrics::parse_mutation_report(read_text(t->second));
            per_test[name] = metrics::cms(g_report.killed, t_report.killed);
        }
        std::vector<double> values;
        for (const auto& [_, v] : per_test) values.push_back(v);
        report["cms"] = metrics::cms_aggregate(values);
        report["cms_per_test"] = per_test;
        if (!a.baseline.empty()) {
            std::map<std::string, double> other;
            try {
                other = nlohmann::json::parse(read_text(a.baseline)).get<std::map<std::string, double>>();
            } catch (const nlohmann::json::exception& e) {
                throw ReportParseError("baseline " + a.baseline + ": " + e.what());
            }
            auto paired = metrics::paired_subsets(per_test, other);
            report["cms_pair"] = {{"ours", paired.a ? nlohmann::json(*paired.a) : nlohmann::json(nullptr)},
                                  {"baseline", paired.b ? nlohmann::json(*paired.b) : nlohmann::json(nullptr)},
                                  {"aligned", paired.aligned}};
        }
    }

    if (!a.coverage_gen.empty()) {
        auto [graph, pairs] = load_index(a.index);
        const auto& focal = graph.at(a.focal);
        auto gen = metrics::parse_coverage_report(read_text(a.coverage_gen), focal);
        auto truth = metrics::parse_coverage_report(read_text(a.coverage_truth), focal);
        auto relation = metrics::coverage_relation(gen, truth);
        report["coverage_relation"] = metrics::to_string(relation);
        report["exact_match_rate"] = relation == metrics::CoverageRelation::ExactMatch ? 1.0 : 0.0;
        report["full_cover_rate"] = metrics::covers_fully(relation) ? 1.0 : 0.0;
    }

    write_text(a.out, report.dump(2) + "\n");
    out << "evaluation written to " << a.out << "\n";
    return kOk;
}

void report_error(std::ostream& err, bool json, const std::string& kind, const std::string& message) {
    if (json)
        err << nlohmann::json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
    else
        err << "error: " << kind << ": " << message << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generates project-specific unit tests from validation intentions.", "intentforge"};
    app.set_version_flag("--version", std::string(INTENTFORGE_VERSION));
    app.require_subcommand(1);
    bool json_errors = false;
    std::string config_path;
    app.add_flag("--json-errors", json_errors, "Report errors on stderr as JSON");
    app.add_option("--config", config_path, "TOML config file (default ./intentforge.toml)");
    Overrides ov;

    IndexArgs index_args;
    auto* index = app.add_subcommand("index", "Parse a project into a code graph and method-test pairs");
    index->add_option("--root", index_args.root, "Project root")->required()->check(CLI::ExistingDirectory);
    index->add_option("--out", index_args.out, "Index directory")->required();

    ReferabilityArgs ref_args;
    auto* referability = app.add_subcommand("referability", "RA/RL over the indexed tests as CSV");
    referability->add_option("--index", ref_args.index, "Index directory")->required();
    referability->add_option("--out", ref_args.out, "CSV output")->required();

    DescribeArgs describe_args;
    auto* describe = app.add_subcommand("describe", "Synthesize validation intentions for indexed tests");
    describe->add_option("--index", describe_args.index, "Index directory")->required();
    describe->add_option("--test", describe_args.tests, "Only these test ids");
    describe->add_option("--out", describe_args.out, "Output index directory (default: in place)");
    describe->add_option("--trace", describe_args.trace, "Trace file (JSON Lines)");

    GenerateArgs gen_args;
    std::string granularity, ablate;
    auto* generate = app.add_subcommand("generate", "Generate a unit test for a focal method");
    generate->add_option("--index", gen_args.index, "Index directory")->required();
    generate->add_option("--focal", gen_args.focal, "Focal method id")->required();
    generate->add_option("--intention", gen_args.intention, "Intention file (text or JSON)")->required();
    generate->add_option("--granularity", granularity, "full|obj|objpre|objexp|none")
        ->check(CLI::IsMember({"full", "obj", "objpre", "objexp", "none"}, CLI::ignore_case));
    generate->add_option("--ablate", ablate, "Comma-separated: no-ref,no-fact");
    generate->add_option("--out", gen_args.out, "Outcome JSON")->required();
    generate->add_option("--trace", gen_args.trace, "Trace file (default <out>.trace.jsonl)");
    generate->add_flag("--dry-run", gen_args.dry_run, "Render the first prompt without contacting any provider");
    std::map<std::string, std::string> key_flags{{"--alpha", "alpha"},         {"--beta", "beta"},
                                                     {"--facts-topk", "top_k"},    {"--facts-depth", "depth"},
                                                     {"--max-outer", "max_outer"}, {"--max-refine", "max_refine"},
                                                     {"--replay-dir", "llm.replay_dir"},
                                                     {"--provider", "llm.provider"}};
    std::map<std::string, std::string> key_values;
    for (const auto& [flag, key] : key_flags) generate->add_option(flag, key_values[flag], key);

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "Outcome breakdown, CMS and coverage relations");
    evaluate->add_option("--outcomes", eval_args.outcomes, "Directory of outcome JSON files")
        ->check(CLI::ExistingDirectory);
    auto* mg = evaluate->add_option("--mutation-gen", eval_args.mutation_gen, "Mutation report(s) of generated tests")
                   ->check(CLI::ExistingPath);
    auto* mt = evaluate->add_option("--mutation-truth", eval_args.mutation_truth, "Mutation report(s) of ground truth")
                   ->check(CLI::ExistingPath);
    mg->needs(mt);
    mt->needs(mg);
    auto* cg = evaluate->add_option("--coverage-gen", eval_args.coverage_gen, "Coverage report of generated test")
                   ->check(CLI::ExistingFile);
    auto* ct = evaluate->add_option("--coverage-truth", eval_args.coverage_truth, "Coverage report of ground truth")
                   ->check(CLI::ExistingFile);
    auto* focal = evaluate->add_option("--focal", eval_args.focal, "Focal method id");
    auto* idx = evaluate->add_option("--index", eval_args.index, "Index directory (for the focal span)");
    cg->needs(ct, focal, idx);
    ct->needs(cg);
    evaluate->add_option("--cms-baseline", eval_args.baseline, "JSON map test -> CMS of another approach")
        ->needs(mg);
    evaluate->add_option("--out", eval_args.out, "Report JSON")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        app.exit(e, out, err);
        return kUsageError;
    }

    try {
        if (!granularity.empty()) ov.set("granularity", granularity);
        if (!ablate.empty()) ov.set("ablations", ablate);
        for (const auto& [flag, key] : key_flags)
            if (!key_values[flag].empty()) ov.set(key, key_values[flag]);

        config::Settings file;
        if (!config_path.empty())
            file = config::settings_from_file(config_path);
        else if (fs::exists("intentforge.toml"))
            file = config::settings_from_file("intentforge.toml");
        auto cfg = config::resolve(file, config::settings_from_env(config::process_environment()), ov.flags);

        if (*index) return cmd_index(index_args, cfg, out, err);
        if (*referability) return cmd_referability(ref_args, cfg, out);
        if (*describe) return cmd_describe(describe_args, cfg, out, err);
        if (*generate) return cmd_generate(gen_args, cfg, out);
        if (*evaluate) return cmd_evaluate(eval_args, out);
    } catch (const Error& e) {
        report_error(err, json_errors, e.kind(), e.what());
        return kDomainError;
    } catch (const fs::filesystem_error& e) {
        report_error(err, json_errors, "IOError", e.what());
        return kDomainError;
    } catch (const std::exception& e) {
        report_error(err, json_errors, "InternalError", e.what());
        return kDomainError;
    }
    return kUsageError;
}

}  // namespace intentforge::cli
