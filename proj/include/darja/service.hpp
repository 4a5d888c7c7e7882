#pragma once

#include <memory>
#include <string>

#include "darja/app.hpp"
#include "darja/telemetry.hpp"

namespace httplib {
class Server;
}

namespace darja {

struct ServiceOptions {
    ChunkOptions chunking;
    std::string index_dir;  // re-ingested knowledge is persisted here when set
};

// JSON endpoints over an Engine:
//   POST /v1/chat      {session_id, text}
//   POST /v1/classify  {text}
//   POST /v1/ingest    {path} or {id, text[, title, format]}
//   GET  /v1/healthz
//   GET  /v1/metrics   (text/plain)
// Errors are {"error": {"code", "message"}}.
class ChatService {
public:
    ChatService(std::shared_ptr<Engine> engine, ServiceOptions options);
    ~ChatService();

    void mount(httplib::Server& server);

    // Blocks until stop(). Throws RuntimeError when the address cannot be bound.
    void listen(const std::string& host, int port);
    // Binds an ephemeral port and returns it; serve with run().
    int bind_any(const std::string& host);
    void run();
    void stop();

    ServiceMetrics& metrics() { return metrics_; }

private:
    std::shared_ptr<Engine> engine_;
    ServiceOptions options_;
    ServiceMetrics metrics_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace darja
