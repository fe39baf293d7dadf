#include <httplib.h>

#include "intentforge/http.hpp"

#include <chrono>
#include <thread>

namespace intentforge::http {

namespace {

struct Target {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Target split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw HttpFailure("not an absolute URL: " + url);
    auto slash = url.find('/', scheme_end + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

std::string post_json(const std::string& url, const std::string& body, const PostOptions& options) {
    auto target = split_url(url);
    httplib::Client client(target.origin);
    auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(options.timeout_seconds));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    for (const auto& [k, v] : options.headers) headers.emplace(k, v);

    double delay = options.backoff_seconds;
    std::string last_error;
    int last_status = 0;
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
            delay *= 2;
        }
        auto res = client.Post(target.path, headers, body, "application/json");
        if (!res) {
            last_error = "request to " + url + " failed: " + httplib::to_string(res.error());
            last_status = 0;
            continue;
        }
        if (res->status >= 200 && res->status < 300) return res->body;
        last_status = res->status;
        last_error = "HTTP " + std::to_string(res->status) + " from " + url + ": " +
                     res->body.substr(0, 500);
        if (res->status != 429 && res->status < 500) break;
    }
    HttpFailure failure(last_error);
    failure.status = last_status;
    throw failure;
}

}  // namespace intentforge::http
