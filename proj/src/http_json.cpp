#include "darja/http_json.hpp"

#include <httplib.h>

#include "darja/error.hpp"

namespace darja::http {

Endpoint parse_endpoint(std::string_view url) {
    const auto scheme = url.find("://");
    if (scheme == std::string_view::npos || scheme == 0) {
        throw RuntimeError("endpoint '" + std::string(url) + "' has no scheme");
    }
    const auto slash = url.find('/', scheme + 3);
    Endpoint ep;
    ep.base = std::string(url.substr(0, slash));
    ep.path = slash == std::string_view::npos ? "/" : std::string(url.substr(slash));
    if (ep.base.size() == scheme + 3) throw RuntimeError("endpoint '" + std::string(url) + "' has no host");
    return ep;
}

nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body, int timeout_ms) {
    httplib::Client client(endpoint.base);
    const auto sec = timeout_ms / 1000;
    const auto usec = (timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);

    const auto res = client.Post(endpoint.path, body.dump(), "application/json");
    const std::string where = endpoint.base + endpoint.path;
    if (!res) {
        throw ProviderError(where + ": " + httplib::to_string(res.error()), true);
    }
    if (res->status != 200) {
        throw ProviderError(where + ": HTTP " + std::to_string(res->status), true);
    }
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(where + ": malformed reply: " + e.what(), false);
    }
}

}  // namespace darja::http
