#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "intentforge/prompt.hpp"

namespace intentforge::config {

struct LlmSettings {
    std::string provider = "http";  // http | replay | record
    std::string endpoint;
    std::string api_key_env;
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    std::string response_path = "choices.0.message.content";
    std::string model;
    std::optional<int> max_output_tokens;
    std::string replay_dir;
    std::optional<std::string> system_prompt;
    double timeout = 300;
    int retries = 3;
};

struct EmbeddingSettings {
    std::string provider = "hash";  // hash | http
    std::string endpoint;
    std::string api_key_env;
    int dim = 256;
    double timeout = 60;
    int retries = 3;
};

struct RunConfig {
    double alpha = 0.5;
    double beta = 0.5;
    int top_k = 3;
    int depth = 2;
    int max_outer = 5;
    int max_refine = 4;
    double temperature = 0;
    prompt::Granularity granularity = prompt::Granularity::Full;
    std::set<prompt::Ablation> ablations;
    bool normalize_occurrence = true;
    std::string framework_version;
    int intention_attempts = 3;

    std::vector<std::string> source_dirs;
    std::vector<std::string> test_dirs;
    std::vector<std::string> test_annotations{"Test"};
    std::vector<std::string> file_extensions{".java"};
    std::vector<std::string> assertion_name_prefixes{"assert", "verify", "fail"};

    std::string compile_cmd;
    std::string test_cmd;
    std::string test_source_dir = "src/test/java";
    double compile_timeout = 300;
    double execute_timeout = 120;
    std::vector<std::string> assertion_markers;  // empty: the defaults

    LlmSettings llm;
    EmbeddingSettings embedding;
};

// Dotted key → textual value. Lists are comma separated.
using Settings = std::map<std::string, std::string>;

// Every accepted key, e.g. `alpha`, `timeouts.compile`, `llm.endpoint`.
const std::vector<std::string>& known_keys();

// `INTENTFORGE_` + upper-cased key with dots as underscores.
std::string env_name(const std::string& key);

// Flattens a TOML document; unknown keys are rejected. Throws ConfigError.
Settings settings_from_toml(const std::string& text, const std::string& origin = "config");
Settings settings_from_file(const std::filesystem::path& path);
// Known keys present in `env`.
Settings settings_from_env(const std::map<std::string, std::string>& env);
std::map<std::string, std::string> process_environment();

// Later layers win: defaults < file < env < flags. Validates the result.
RunConfig resolve(const Settings& file, const Settings& env, const Settings& flags);

// Range checks; throws ConfigError naming the offending key.
void validate(const RunConfig& config);

// Commands are only needed when something is actually run.
void require_commands(const RunConfig& config);

}  // namespace intentforge::config
