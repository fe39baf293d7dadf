#include "intentforge/llm.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "intentforge/error.hpp"
#include "intentforge/http.hpp"

namespace intentforge::llm {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
        throw ProviderError("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

namespace {

nlohmann::json canonical(const CompletionRequest& request) {
    nlohmann::json j;
    j["system"] = request.system ? nlohmann::json(*request.system) : nlohmann::json(nullptr);
    j["user"] = request.user;
    return j;
}

std::optional<std::string> read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string request_hash(const CompletionRequest& request) {
    return sha256_hex(canonical(request).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
}

std::string ReplayProvider::complete(const CompletionRequest& request) {
    const auto hash = request_hash(request);
    if (!dir_) {
        auto it = store_.find(hash);
        if (it == store_.end()) throw ReplayMissError("no replay entry for request hash " + hash);
        return it->second;
    }
    auto text = read_text(*dir_ / (hash + ".json"));
    if (!text) throw ReplayMissError("no replay entry for request hash " + hash + " in " + dir_->string());
    try {
        return nlohmann::json::parse(*text).at("response").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ReplayMissError("unreadable replay entry " + hash + ": " + e.what());
    }
}

void write_replay_entry(const std::filesystem::path& dir, const CompletionRequest& request,
                        const std::string& response) {
    std::filesystem::create_directories(dir);
    auto entry = canonical(request);
    entry["response"] = response;
    const auto hash = request_hash(request);
    // Write then rename so concurrent readers never see a partial file.
    auto tmp = dir / (hash + ".json.tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        out << entry.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << "\n";
        if (!out) throw ProviderError("cannot write replay entry " + tmp.string());
    }
    std::filesystem::rename(tmp, dir / (hash + ".json"));
}

std::string RecordingProvider::complete(const CompletionRequest& request) {
    auto response = inner_->complete(request);
    std::lock_guard lock(mutex_);
    write_replay_entry(dir_, request, response);
    return response;
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw ConfigError("completion endpoint is not configured");
}

nlohmann::json HttpProvider::request_body(const CompletionRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    if (request.system) messages.push_back({{"role", "system"}, {"content", *request.system}});
    messages.push_back({{"role", "user"}, {"content", request.user}});
    nlohmann::json body{{"model", request.model_id}, {"temperature", request.temperature}, {"messages", messages}};
    if (request.max_output_tokens) body["max_tokens"] = *request.max_output_tokens;
    return body;
}

std::string extract_response(const nlohmann::json& reply, std::string_view path) {
    const nlohmann::json* cur = &reply;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto dot = path.find('.', start);
        auto part = std::string(path.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (cur->is_array()) {
            char* end = nullptr;
            auto idx = std::strtoul(part.c_str(), &end, 10);
            if (part.empty() || *end || idx >= cur->size())
                throw ProviderError("response path '" + std::string(path) + "' does not resolve");
            cur = &(*cur)[idx];
        } else if (cur->is_object() && cur->contains(part)) {
            cur = &(*cur)[part];
        } else {
            throw ProviderError("response path '" + std::string(path) + "' does not resolve");
        }
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    if (!cur->is_string()) throw ProviderError("response path '" + std::string(path) + "' is not a string");
    return cur->get<std::string>();
}

std::string HttpProvider::complete(const CompletionRequest& request) {
    http::PostOptions options;
    options.timeout_seconds = config_.timeout_seconds;
    options.max_retries = config_.max_retries;
    options.backoff_seconds = config_.backoff_seconds;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key) throw ProviderError("environment variable " + config_.api_key_env + " is not set");
        options.headers[config_.auth_header] = config_.auth_prefix + key;
    }
    try {
        auto body = http::post_json(config_.endpoint, request_body(request).dump(-1, ' ', false,
                                                                                nlohmann::json::error_handler_t::replace),
                                    options);
        return extract_response(nlohmann::json::parse(body), config_.response_path);
    } catch (const http::HttpFailure& e) {
        throw ProviderError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed completion response: ") + e.what());
    }
}

}  // namespace intentforge::llm
