#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace intentforge::http {

struct HttpFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
    int status = 0;  // 0 when no response arrived
};

struct PostOptions {
    std::map<std::string, std::string> headers;
    double timeout_seconds = 60;
    int max_retries = 3;          // extra attempts after the first
    double backoff_seconds = 1;   // doubled after every failed attempt
};

// POSTs a JSON body and returns the response body of a 2xx reply. Connection
// errors, 429 and 5xx are retried; anything else fails immediately.
std::string post_json(const std::string& url, const std::string& body, const PostOptions& options);

}  // namespace intentforge::http
