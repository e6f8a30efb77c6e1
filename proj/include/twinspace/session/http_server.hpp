#pragma once

#include "twinspace/session/service.hpp"

#include <atomic>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace twinspace::session {

// JSON-over-HTTP front end for a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();

    // Binds to an ephemeral port and returns it; -1 on failure.
    int bind_any(const std::string& host = "127.0.0.1");
    bool bind(const std::string& host, int port);
    // Blocks until stop().
    bool serve();
    void stop();

private:
    void routes();

    Service& service_;
    std::unique_ptr<httplib::Server> server_;
    std::atomic<bool> stopping_{false};
};

} // namespace twinspace::session
