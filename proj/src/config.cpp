#include "intentforge/config.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include "intentforge/error.hpp"

extern char** environ;

namespace intentforge::config {

namespace {

const std::set<std::string>& list_keys() {
    static const std::set<std::string> keys{"ablations",        "source_dirs",
                                            "test_dirs",        "test_annotations",
                                            "file_extensions",  "assertion_name_prefixes",
                                            "assertion_markers"};
    return keys;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::string scalar_text(const toml::node& node, const std::string& key) {
    if (auto s = node.as_string()) return s->get();
    if (auto i = node.as_integer()) return std::to_string(i->get());
    if (auto f = node.as_floating_point()) {
        std::ostringstream os;
        os.precision(17);
        os << f->get();
        return os.str();
    }
    if (auto b = node.as_boolean()) return b->get() ? "true" : "false";
    throw ConfigError("config key " + key + " must be a string, number or boolean");
}

void flatten(const toml::table& table, const std::string& prefix, Settings& out, const std::string& origin) {
    const auto& keys = known_keys();
    for (const auto& [k, node] : table) {
        const std::string key = prefix + std::string(k.str());
        if (auto sub = node.as_table()) {
            flatten(*sub, key + ".", out, origin);
            continue;
        }
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError(origin + ": unknown config key '" + key + "'");
        if (auto arr = node.as_array()) {
            if (!list_keys().count(key)) throw ConfigError(origin + ": config key " + key + " is not a list");
            std::vector<std::string> items;
            for (const auto& item : *arr) items.push_back(scalar_text(item, key));
            std::string joined;
            for (const auto& item : items) {
                if (item.find(',') != std::string::npos)
                    throw ConfigError(origin + ": list items of " + key + " may not contain ','");
                joined += (joined.empty() ? "" : ",") + item;
            }
            out[key] = joined;
        } else {
            out[key] = scalar_text(node, key);
        }
    }
}

double to_double(const Settings& s, const std::string& key, double fallback) {
    auto it = s.find(key);
    if (it == s.end()) return fallback;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used == it->second.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key " + key + " expects a number, got '" + it->second + "'");
}

int to_int(const Settings& s, const std::string& key, int fallback) {
    auto it = s.find(key);
    if (it == s.end()) return fallback;
    try {
        std::size_t used = 0;
        int v = std::stoi(it->second, &used);
        if (used == it->second.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key " + key + " expects an integer, got '" + it->second + "'");
}

bool to_bool(const Settings& s, const std::string& key, bool fallback) {
    auto it = s.find(key);
    if (it == s.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key " + key + " expects a boolean, got '" + it->second + "'");
}

void assign(const Settings& s, const std::string& key, std::string& target) {
    if (auto it = s.find(key); it != s.end()) target = it->second;
}

void assign(const Settings& s, const std::string& key, std::vector<std::string>& target) {
    if (auto it = s.find(key); it != s.end()) target = split_list(it->second);
}

bool has_target_placeholder(const std::string& command) {
    return command.find("{test_file}") != std::string::npos || command.find("{test_class}") != std::string::npos;
}

}  // namespace

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "alpha",          "beta",
        "top_k",          "depth",
        "max_outer",      "max_refine",
        "temperature",    "granularity",
        "ablations",      "normalize_occurrence",
        "framework_version", "intention_attempts",
        "source_dirs",    "test_dirs",
        "test_annotations", "file_extensions",
        "assertion_name_prefixes", "compile_cmd",
        "test_cmd",       "test_source_dir",
        "timeouts.compile", "timeouts.execute",
        "assertion_markers", "llm.provider",
        "llm.endpoint",   "llm.api_key_env",
        "llm.auth_header", "llm.auth_prefix",
        "llm.response_path", "llm.model",
        "llm.max_output_tokens", "llm.replay_dir",
        "llm.system_prompt", "llm.timeout",
        "llm.retries",    "embedding.provider",
        "embedding.endpoint", "embedding.api_key_env",
        "embedding.dim",  "embedding.timeout",
        "embedding.retries"};
    return keys;
}

std::string env_name(const std::string& key) {
    std::string out = "INTENTFORGE_";
    for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

Settings settings_from_toml(const std::string& text, const std::string& origin) {
    toml::table table;
    try {
        table = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << origin << ": " << e.description() << " at line " << e.source().begin.line;
        throw ConfigError(os.str());
    }
    Settings out;
    flatten(table, "", out, origin);
    return out;
}

Settings settings_from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return settings_from_toml(ss.str(), path.string());
}

Settings settings_from_env(const std::map<std::string, std::string>& env) {
    Settings out;
    for (const auto& key : known_keys())
        if (auto it = env.find(env_name(key)); it != env.end()) out[key] = it->second;
    return out;
}

std::map<std::string, std::string> process_environment() {
    std::map<std::string, std::string> env;
    for (char** e = environ; e && *e; ++e) {
        std::string entry(*e);
        auto eq = entry.find('=');
        if (eq != std::string::npos && entry.rfind("INTENTFORGE_", 0) == 0)
            env[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    return env;
}

RunConfig resolve(const Settings& file, const Settings& env, const Settings& flags) {
    Settings s = file;
    for (const auto& layer : {env, flags})
        for (const auto& [k, v] : layer) s[k] = v;

    RunConfig c;
    c.alpha = to_double(s, "alpha", c.alpha);
    c.beta = to_double(s, "beta", c.beta);
    c.top_k = to_int(s, "top_k", c.top_k);
    c.depth = to_int(s, "depth", c.depth);
    c.max_outer = to_int(s, "max_outer", c.max_outer);
    c.max_refine = to_int(s, "max_refine", c.max_refine);
    c.temperature = to_double(s, "temperature", c.temperature);
    if (auto it = s.find("granularity"); it != s.end()) {
        auto g = prompt::parse_granularity(it->second);
        if (!g) throw ConfigError("unknown granularity '" + it->second + "' (full|obj|objpre|objexp|none)");
        c.granularity = *g;
    }
    if (auto it = s.find("ablations"); it != s.end()) {
        for (const auto& item : split_list(it->second)) {
            auto a = prompt::parse_ablation(item);
            if (!a) throw ConfigError("unknown ablation '" + item + "' (no-ref|no-fact)");
            c.ablations.insert(*a);
        }
    }
    c.normalize_occurrence = to_bool(s, "normalize_occurrence", c.normalize_occurrence);
    assign(s, "framework_version", c.framework_version);
    c.intention_attempts = to_int(s, "intention_attempts", c.intention_attempts);
    assign(s, "source_dirs", c.source_dirs);
    assign(s, "test_dirs", c.test_dirs);
    assign(s, "test_annotations", c.test_annotations);
    assign(s, "file_extensions", c.file_extensions);
    assign(s, "assertion_name_prefixes", c.assertion_name_prefixes);
    assign(s, "compile_cmd", c.compile_cmd);
    assign(s, "test_cmd", c.test_cmd);
    assign(s, "test_source_dir", c.test_source_dir);
    c.compile_timeout = to_double(s, "timeouts.compile", c.compile_timeout);
    c.execute_timeout = to_double(s, "timeouts.execute", c.execute_timeout);
    assign(s, "assertion_markers", c.assertion_markers);

    assign(s, "llm.provider", c.llm.provider);
    assign(s, "llm.endpoint", c.llm.endpoint);
    assign(s, "llm.api_key_env", c.llm.api_key_env);
    assign(s, "llm.auth_header", c.llm.auth_header);
    assign(s, "llm.auth_prefix", c.llm.auth_prefix);
    assign(s, "llm.response_path", c.llm.response_path);
    assign(s, "llm.model", c.llm.model);
    if (s.count("llm.max_output_tokens")) c.llm.max_output_tokens = to_int(s, "llm.max_output_tokens", 0);
    assign(s, "llm.replay_dir", c.llm.replay_dir);
    if (auto it = s.find("llm.system_prompt"); it != s.end()) c.llm.system_prompt = it->second;
    c.llm.timeout = to_double(s, "llm.timeout", c.llm.timeout);
    c.llm.retries = to_int(s, "llm.retries", c.llm.retries);

    assign(s, "embedding.provider", c.embedding.provider);
    assign(s, "embedding.endpoint", c.embedding.endpoint);
    assign(s, "embedding.api_key_env", c.embedding.api_key_env);
    c.embedding.dim = to_int(s, "embedding.dim", c.embedding.dim);
    c.embedding.timeout = to_double(s, "embedding.timeout", c.embedding.timeout);
    c.embedding.retries = to_int(s, "embedding.retries", c.embedding.retries);

    validate(c);
    return c;
}

void validate(const RunConfig& c) {
    auto open_unit = [](double v, const char* key) {
        if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(key) + " must lie strictly between 0 and 1");
    };
    auto at_least_one = [](int v, const char* key) {
        if (v < 1) throw ConfigError(std::string(key) + " must be at least 1");
    };
    open_unit(c.alpha, "alpha");
    open_unit(c.beta, "beta");
    at_least_one(c.top_k, "top_k");
    at_least_one(c.depth, "depth");
    at_least_one(c.max_outer, "max_outer");
    at_least_one(c.max_refine, "max_refine");
    at_least_one(c.intention_attempts, "intention_attempts");
    if (c.temperature < 0) throw ConfigError("temperature must not be negative");
    if (!(c.compile_timeout > 0) || !(c.execute_timeout > 0)) throw ConfigError("timeouts must be positive");
    // Compilation may build the whole tree; execution has to single out the generated test.
    if (!c.test_cmd.empty() && !has_target_placeholder(c.test_cmd))
        throw ConfigError("test_cmd must reference {test_file} or {test_class}");
    for (const auto& marker : c.assertion_markers) {
        try {
            std::regex re(marker);
        } catch (const std::regex_error&) {
            throw ConfigError("assertion marker is not a valid regex: " + marker);
        }
    }
    if (c.llm.provider != "http" && c.llm.provider != "replay" && c.llm.provider != "record")
        throw ConfigError("llm.provider must be http, replay or record");
    if (c.llm.provider != "http" && c.llm.replay_dir.empty())
        throw ConfigError("llm.replay_dir is required for the " + c.llm.provider + " provider");
    if (c.llm.max_output_tokens && *c.llm.max_output_tokens < 1)
        throw ConfigError("llm.max_output_tokens must be at least 1");
    if (c.llm.retries < 0 || c.embedding.retries < 0) throw ConfigError("retries must not be negative");
    if (c.embedding.provider != "hash" && c.embedding.provider != "http")
        throw ConfigError("embedding.provider must be hash or http");
    if (c.embedding.provider == "http" && c.embedding.endpoint.empty())
        throw ConfigError("embedding.endpoint is required for the http embedding provider");
    at_least_one(c.embedding.dim, "embedding.dim");
}

void require_commands(const RunConfig& c) {
    if (c.compile_cmd.empty() || c.test_cmd.empty())
        throw ConfigError("compile_cmd and test_cmd must be configured to run generated tests");
}

}  // namespace intentforge::config
