#ifndef FEWMT_SRC_HTTP_UTIL_HPP
#define FEWMT_SRC_HTTP_UTIL_HPP

#include <string>

#include "fewmt/net.hpp"
#include "json.hpp"

namespace fewmt::detail {

// POST body to base_url + path and parse the JSON response. Connection
// failures and 5xx are retried per policy and end in TransportError; 4xx
// raises BackendRefused; non-JSON bodies raise ProtocolError.
nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, const RetryPolicy& retry,
                         const std::string& auth_token, const std::string& what);

bool get_ok(const std::string& base_url, const std::string& path);

}  // namespace fewmt::detail

#endif  // FEWMT_SRC_HTTP_UTIL_HPP
