#pragma once

// Shared POST-with-retry plumbing for the chat and embedding clients.
// Not installed; internal to the library.

#include <algorithm>
#include <chrono>
#include <random>
#include <string>
#include <thread>

#include <httplib.h>

#include "cvsskit/errors.hpp"

namespace cvsskit::detail {

struct RetryParams {
    int timeout_s = 120;
    int max_retries = 3;
    int backoff_base_ms = 1000;
    std::string api_key;
};

struct PostResult {
    std::string body;
    int attempt = 1;
};

inline bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

/// POSTs a JSON body, retrying 429/5xx/transport failures with exponential
/// backoff plus jitter. Throws per the client error contract.
inline PostResult post_json_with_retry(const std::string& endpoint, const std::string& path,
                                       const std::string& body, const RetryParams& params) {
    std::mt19937 jitter_rng(std::random_device{}());

    int attempt = 0;
    bool last_was_transport = false;
    int last_status = 0;
    std::string last_detail;

    while (attempt <= params.max_retries) {
        ++attempt;

        httplib::Client client(endpoint);
        client.set_connection_timeout(params.timeout_s, 0);
        client.set_read_timeout(params.timeout_s, 0);
        client.set_write_timeout(params.timeout_s, 0);
        httplib::Headers headers;
        if (!params.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + params.api_key);
        }

        auto result = client.Post(path, headers, body, "application/json");
        if (!result) {
            last_was_transport = true;
            last_detail = httplib::to_string(result.error());
        } else if (result->status == 200) {
            return {result->body, attempt};
        } else if (retryable_status(result->status)) {
            last_was_transport = false;
            last_status = result->status;
            last_detail = result->body;
        } else {
            throw BadResponseShape("unexpected HTTP status " + std::to_string(result->status) +
                                   " from " + endpoint + path);
        }

        if (attempt <= params.max_retries) {
            const int doublings = std::min(attempt - 1, 16); // cap, avoid shift overflow
            const int base = params.backoff_base_ms << doublings;
            std::uniform_int_distribution<int> jitter(0, std::max(1, base / 2));
            std::this_thread::sleep_for(std::chrono::milliseconds(base + jitter(jitter_rng)));
        }
    }

    if (last_was_transport) {
        throw EndpointUnreachable("cannot reach " + endpoint + path + " after " +
                                  std::to_string(attempt) + " attempts: " + last_detail);
    }
    throw RateLimitedExhausted("gave up on " + endpoint + path + " after " +
                               std::to_string(attempt) + " attempts, last status " +
                               std::to_string(last_status));
}

} // namespace cvsskit::detail
