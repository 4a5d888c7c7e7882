#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace darja::http {

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;  // starts with '/'
};

// Throws RuntimeError for URLs without a scheme or host.
Endpoint parse_endpoint(std::string_view url);

// POST a JSON body and decode the JSON reply.
// Unreachable host, timeout, or non-200 → retryable ProviderError;
// an undecodable body → non-retryable ProviderError.
nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body, int timeout_ms);

}  // namespace darja::http
