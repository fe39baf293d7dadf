#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace intentforge::llm {

struct CompletionRequest {
    std::optional<std::string> system;
    std::string user;
    double temperature = 0;
    std::string model_id;
    std::optional<int> max_output_tokens;
};

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual std::string id() const = 0;
    virtual std::string complete(const CompletionRequest& request) = 0;
};

// Lowercase hex SHA-256 of the canonical JSON `{"system": ..., "user": ...}`
// (sorted keys, no whitespace, system null when absent).
std::string request_hash(const CompletionRequest& request);
std::string sha256_hex(std::string_view data);

// Canned responses keyed by request hash. The directory form reads
// `<dir>/<hash>.json` files holding {"system", "user", "response"}.
class ReplayProvider : public CompletionProvider {
public:
    explicit ReplayProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
    explicit ReplayProvider(std::map<std::string, std::string> store) : store_(std::move(store)) {}
    std::string id() const override { return "replay"; }
    std::string complete(const CompletionRequest& request) override;

private:
    std::optional<std::filesystem::path> dir_;
    std::map<std::string, std::string> store_;
};

void write_replay_entry(const std::filesystem::path& dir, const CompletionRequest& request,
                        const std::string& response);

// Forwards to another provider and stores every exchange as a replay entry.
class RecordingProvider : public CompletionProvider {
public:
    RecordingProvider(std::shared_ptr<CompletionProvider> inner, std::filesystem::path dir)
        : inner_(std::move(inner)), dir_(std::move(dir)) {}
    std::string id() const override { return "record:" + inner_->id(); }
    std::string complete(const CompletionRequest& request) override;

private:
    std::shared_ptr<CompletionProvider> inner_;
    std::filesystem::path dir_;
    std::mutex mutex_;
};

struct HttpProviderConfig {
    std::string endpoint;
    std::string api_key_env;  // env var holding the key; empty: no auth header
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    std::string response_path = "choices.0.message.content";
    double timeout_seconds = 300;
    int max_retries = 3;
    double backoff_seconds = 2;
};

// POST {"model", "temperature", "messages": [{"role", "content"}...]}.
class HttpProvider : public CompletionProvider {
public:
    explicit HttpProvider(HttpProviderConfig config);
    std::string id() const override { return "http:" + config_.endpoint; }
    std::string complete(const CompletionRequest& request) override;

    static nlohmann::json request_body(const CompletionRequest& request);

private:
    HttpProviderConfig config_;
};

// Follows a dotted path of object keys and array indices, e.g.
// `choices.0.message.content`. Throws ProviderError when it does not resolve
// to a string.
std::string extract_response(const nlohmann::json& reply, std::string_view path);

}  // namespace intentforge::llm
