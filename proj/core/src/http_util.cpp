#include "http_util.hpp"

#include <thread>

#include "fewmt/errors.hpp"
#include "httplib.h"

namespace fewmt::detail {

nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, const RetryPolicy& retry,
                         const std::string& auth_token, const std::string& what) {
    httplib::Client client(base_url);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    if (!auth_token.empty()) client.set_bearer_token_auth(auth_token);

    const std::string payload = body.dump();
    std::string last_failure = "no attempt made";
    auto backoff = retry.initial_backoff;
    const int attempts = std::max(retry.max_attempts, 1);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<long>(static_cast<double>(backoff.count()) * retry.multiplier));
        }
        auto res = client.Post(path, payload, "application/json");
        if (!res) {
            last_failure = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_failure = "server returned " + std::to_string(res->status);
            continue;
        }
        if (res->status >= 400) {
            throw BackendRefused(what + ": " + base_url + path + " returned " +
                                 std::to_string(res->status) + ": " + res->body);
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw ProtocolError(what + ": response is not valid JSON: " + e.what());
        }
    }
    throw TransportError(what + ": " + base_url + path + " unreachable after " +
                         std::to_string(attempts) + " attempts (" + last_failure + ")");
}

bool get_ok(const std::string& base_url, const std::string& path) {
    httplib::Client client(base_url);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(10, 0);
    auto res = client.Get(path);
    return res && res->status >= 200 && res->status < 300;
}

}  // namespace fewmt::detail
