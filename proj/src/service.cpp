#include "darja/service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <json.hpp>

#include "darja/error.hpp"
#include "darja/unicode.hpp"

namespace darja {

using nlohmann::json;

namespace {

struct HttpError {
    int status;
    std::string code;
    std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, const HttpError& e) {
    send_json(res, e.status, {{"error", {{"code", e.code}, {"message", e.message}}}});
}

json parse_body(const httplib::Request& req) {
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) throw HttpError{400, "bad_json", "request body is not valid JSON"};
    if (!body.is_object()) throw HttpError{400, "bad_request", "request body must be a JSON object"};
    return body;
}

std::string string_field(const json& body, const char* key, bool required) {
    const auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
        if (required) throw HttpError{400, "bad_request", std::string("missing field '") + key + "'"};
        return {};
    }
    if (!it->is_string()) throw HttpError{400, "bad_request", std::string("field '") + key + "' must be a string"};
    return it->get<std::string>();
}

json latency_json(const StageLatencies& lat) {
    json out = json::object();
    for (const auto& [stage, ms] : lat) out[stage] = ms;
    return out;
}

// httplib defaults to SO_REUSEPORT, which lets a second server share a busy
// port silently. Plain SO_REUSEADDR still allows a quick restart.
std::unique_ptr<httplib::Server> make_server() {
    auto server = std::make_unique<httplib::Server>();
    server->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    return server;
}

}  // namespace

ChatService::ChatService(std::shared_ptr<Engine> engine, ServiceOptions options)
    : engine_(std::move(engine)), options_(std::move(options)) {}

ChatService::~ChatService() { stop(); }

void ChatService::mount(httplib::Server& server) {
    // Every handler goes through here so errors come back structured and counted.
    auto wrap = [this](std::string endpoint, std::function<void(const httplib::Request&, httplib::Response&)> fn) {
        return [this, endpoint = std::move(endpoint), fn = std::move(fn)](const httplib::Request& req,
                                                                          httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const HttpError& e) {
                send_error(res, e);
            } catch (const DataError& e) {
                send_error(res, {400, "invalid_input", e.what()});
            } catch (const ProviderError& e) {
                spdlog::error("{}: provider failure: {}", endpoint, e.what());
                send_error(res, {502, "provider_error", e.what()});
            } catch (const std::exception& e) {
                spdlog::error("{}: {}", endpoint, e.what());
                send_error(res, {500, "internal", e.what()});
            }
            metrics_.count_request(endpoint, res.status);
        };
    };

    server.Get("/v1/healthz", wrap("healthz", [](const httplib::Request&, httplib::Response& res) {
                   send_json(res, 200, {{"status", "ok"}});
               }));

    server.Get("/v1/metrics", wrap("metrics", [this](const httplib::Request&, httplib::Response& res) {
                   res.set_content(metrics_.render(), "text/plain; version=0.0.4");
               }));

    server.Post("/v1/chat", wrap("chat", [this](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    const auto session = string_field(body, "session_id", true);
                    const auto text = string_field(body, "text", true);
                    if (session.empty()) throw HttpError{400, "bad_request", "session_id is empty"};
                    if (unicode::trim(text).empty()) throw HttpError{400, "empty_text", "text is empty"};
                    const auto reply = engine_->handle_turn(session, text);
                    const auto route = std::string(to_string(reply.route.path));
                    metrics_.observe_turn(route, reply.latency);
                    send_json(res, 200,
                              {{"reply", reply.text},
                               {"route", route},
                               {"intent", reply.intent ? json(*reply.intent) : json(nullptr)},
                               {"confidence", reply.route.confidence},
                               {"sources", reply.sources},
                               {"script", std::string(to_string(reply.script))},
                               {"grounded", reply.grounded},
                               {"latency_ms", latency_json(reply.latency)}});
                }));

    server.Post("/v1/classify", wrap("classify", [this](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    const auto text = string_field(body, "text", true);
                    if (unicode::trim(text).empty()) throw HttpError{400, "empty_text", "text is empty"};
                    const auto c = engine_->classify(text);
                    const auto decision = route(c.prediction, engine_->tau(), engine_->knowledge_ids());
                    send_json(res, 200,
                              {{"intent", c.intent},
                               {"confidence", c.prediction.confidence},
                               {"route", std::string(to_string(decision.path))},
                               {"script", std::string(to_string(c.normalized.script))},
                               {"normalized", c.normalized.text}});
                }));

    server.Post("/v1/ingest", wrap("ingest", [this](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    auto chunking = options_.chunking;
                    if (body.contains("offers")) {
                        const auto& offers = body["offers"];
                        if (!offers.is_array()) throw HttpError{400, "bad_request", "offers must be an array"};
                        chunking.offers.clear();
                        for (const auto& o : offers) {
                            if (!o.is_string()) throw HttpError{400, "bad_request", "offers must hold strings"};
                            chunking.offers.push_back(o.get<std::string>());
                        }
                    }
                    const auto path = string_field(body, "path", false);
                    const auto text = string_field(body, "text", false);
                    if (path.empty() == text.empty())
                        throw HttpError{400, "bad_request", "give exactly one of 'path' or 'text'"};
                    std::vector<std::string> documents;
                    std::size_t added = 0;
                    if (!path.empty()) {
                        for (const auto& file : document_paths(path)) {
                            auto doc = load_document(file);
                            added += engine_->ingest(doc, chunking);
                            documents.push_back(doc.id);
                        }
                    } else {
                        SourceDocument doc;
                        doc.id = string_field(body, "id", true);
                        if (doc.id.empty()) throw HttpError{400, "bad_request", "id is empty"};
                        doc.title = string_field(body, "title", false);
                        doc.body = text;
                        const auto format = string_field(body, "format", false);
                        if (format.empty() || format == "markdown") {
                            doc.format = DocFormat::Markdown;
                        } else if (format == "plain") {
                            doc.format = DocFormat::Plain;
                        } else {
                            throw HttpError{400, "bad_request", "format must be markdown or plain"};
                        }
                        added += engine_->ingest(doc, chunking);
                        documents.push_back(doc.id);
                    }
                    if (!options_.index_dir.empty()) engine_->knowledge().save(options_.index_dir);
                    const auto total = engine_->knowledge().snapshot()->chunks.size();
                    send_json(res, 200, {{"documents", documents}, {"chunks", added}, {"total_chunks", total}});
                }));

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        const auto code = res.status == 404 ? "not_found" : res.status == 405 ? "method_not_allowed" : "http_error";
        send_error(res, {res.status, code, httplib::status_message(res.status)});
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        send_error(res, {500, "internal", "unhandled server error"});
    });
}

void ChatService::listen(const std::string& host, int port) {
    server_ = make_server();
    mount(*server_);
    if (!server_->bind_to_port(host, port))
        throw RuntimeError("cannot bind " + host + ":" + std::to_string(port) + " (port busy?)");
    spdlog::info("listening on {}:{}", host, port);
    server_->listen_after_bind();
}

int ChatService::bind_any(const std::string& host) {
    server_ = make_server();
    mount(*server_);
    const int port = server_->bind_to_any_port(host);
    if (port <= 0) throw RuntimeError("cannot bind " + host);
    return port;
}

void ChatService::run() {
    if (!server_) throw RuntimeError("service not bound");
    server_->listen_after_bind();
}

void ChatService::stop() {
    if (server_) server_->stop();
}

}  // namespace darja
