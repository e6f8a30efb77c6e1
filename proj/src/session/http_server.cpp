#include "twinspace/session/http_server.hpp"

#include "twinspace/error.hpp"

#include "httplib.h"

#include <sstream>

namespace twinspace::session {

using nlohmann::json;

namespace {

void send_error(httplib::Response& res, int status, const std::string& message, json extra = json::object())
{
    extra["error"] = message;
    res.status = status;
    res.set_content(extra.dump(), "application/json");
}

template <class F>
httplib::Server::Handler guarded(F f)
{
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const NotFound& e) {
            send_error(res, 404, e.what());
        } catch (const SchemaError& e) {
            send_error(res, 400, e.what(), {{"path", e.path()}});
        } catch (const ParseError& e) {
            send_error(res, 400, e.what(), {{"row", e.row()}});
        } catch (const Cancelled& e) {
            send_error(res, 409, e.what());
        } catch (const json::exception& e) {
            send_error(res, 400, std::string("malformed request: ") + e.what());
        } catch (const Error& e) {
            send_error(res, 400, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    };
}

void reply(httplib::Response& res, const json& body, int status = 200)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json body_json(const httplib::Request& req)
{
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw SchemaError("/", std::string("request body is not valid JSON: ") + e.what());
    }
}

std::string param(const httplib::Request& req, const std::string& key, const std::string& fallback = "")
{
    return req.has_param(key) ? req.get_param_value(key) : fallback;
}

long long int_param(const httplib::Request& req, const std::string& key, long long fallback)
{
    if (!req.has_param(key)) return fallback;
    const std::string v = req.get_param_value(key);
    try {
        std::size_t used = 0;
        const long long out = std::stoll(v, &used);
        if (used == v.size()) return out;
    } catch (const std::exception&) {
    }
    throw Error("query parameter '" + key + "' is not an integer: " + v);
}

bool flag_param(const httplib::Request& req, const std::string& key)
{
    const std::string v = param(req, key);
    return v == "1" || v == "true";
}

json event_json(const Event& e)
{
    return {{"seq", e.seq}, {"type", e.type}, {"data", e.data}};
}

} // namespace

HttpServer::HttpServer(Service& service) : service_(service), server_(std::make_unique<httplib::Server>())
{
    server_->new_task_queue = [] { return new httplib::ThreadPool(16); };
    routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind_any(const std::string& host) { return server_->bind_to_any_port(host); }

bool HttpServer::bind(const std::string& host, int port) { return server_->bind_to_port(host, port); }

bool HttpServer::serve() { return server_->listen_after_bind(); }

void HttpServer::stop()
{
    stopping_ = true;
    server_->stop();
}

void HttpServer::routes()
{
    auto& s = *server_;
    Service& svc = service_;

    s.Post("/sessions", guarded([&svc](const httplib::Request&, httplib::Response& res) {
        const std::string id = svc.create_session();
        reply(res, {{"id", id}, {"revision", svc.revision(id)}}, 201);
    }));

    s.Get(R"(/sessions/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, {{"id", req.matches[1]}, {"revision", svc.revision(req.matches[1])}});
    }));

    s.Delete(R"(/sessions/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        svc.delete_session(req.matches[1]);
        res.status = 204;
    }));

    s.Post(R"(/sessions/([^/]+)/data)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.upload_data(req.matches[1], body_json(req)));
    }));

    s.Get(R"(/sessions/([^/]+)/config)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.get_config(req.matches[1]));
    }));

    s.Patch(R"(/sessions/([^/]+)/config)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto update = svc.set_config(req.matches[1], body_json(req));
        reply(res, {{"revision", update.revision}, {"plan", update.plan}});
    }));

    s.Get(R"(/sessions/([^/]+)/overview)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.get_overview(req.matches[1]));
    }));

    s.Get(R"(/sessions/([^/]+)/stats)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        std::optional<int> k_max;
        if (req.has_param("k_max")) k_max = static_cast<int>(int_param(req, "k_max", 8));
        reply(res, svc.get_stats(req.matches[1], k_max));
    }));

    s.Get(R"(/sessions/([^/]+)/benchmarks)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.get_benchmarks(req.matches[1]));
    }));

    s.Get(R"(/sessions/([^/]+)/coordinates)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        CoordinateViewOptions opts;
        opts.variable = param(req, "variable");
        opts.center = flag_param(req, "center");
        opts.scale = flag_param(req, "scale");
        std::stringstream hidden(param(req, "hide"));
        for (std::string item; std::getline(hidden, item, ',');) {
            if (!item.empty()) opts.hidden_clusters.insert(std::stoi(item));
        }
        reply(res, svc.get_coordinate_view(req.matches[1], opts));
    }));

    s.Get(R"(/sessions/([^/]+)/breakdown)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.get_breakdown(req.matches[1], static_cast<int>(int_param(req, "cluster", 1))));
    }));

    s.Get(R"(/sessions/([^/]+)/comparison)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.get_comparison(req.matches[1]));
    }));

    s.Post(R"(/sessions/([^/]+)/jobs/(embedding|tour))",
           guarded([&svc](const httplib::Request& req, httplib::Response& res) {
               json body = body_json(req);
               if (!body.contains("panel") || !body["panel"].is_string()) {
                   throw SchemaError("/panel", "missing panel name");
               }
               const std::string panel = body["panel"];
               body.erase("panel");
               const std::string id = req.matches[1];
               const std::string job = req.matches[2] == "embedding" ? svc.compute_embedding(id, panel, body)
                                                                      : svc.compute_tour(id, panel, body);
               reply(res, svc.job_status(id, job), 202);
           }));

    s.Get(R"(/sessions/([^/]+)/jobs/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const long long wait_ms = int_param(req, "wait_ms", 0);
        if (wait_ms > 0) {
            reply(res, svc.wait_job(req.matches[1], req.matches[2], std::chrono::milliseconds(wait_ms)));
        } else {
            reply(res, svc.job_status(req.matches[1], req.matches[2]));
        }
    }));

    s.Delete(R"(/sessions/([^/]+)/jobs/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        svc.cancel_job(req.matches[1], req.matches[2]);
        reply(res, svc.wait_job(req.matches[1], req.matches[2], std::chrono::seconds(10)));
    }));

    s.Get(R"(/sessions/([^/]+)/tours/([^/]+)/frame)",
          guarded([&svc](const httplib::Request& req, httplib::Response& res) {
              const long long position = int_param(req, "position", 1);
              if (position < 1) throw Error("frame positions start at 1");
              std::optional<double> h;
              if (req.has_param("h")) h = std::stod(req.get_param_value("h"));
              reply(res, svc.hold_frame(req.matches[1], req.matches[2], static_cast<std::size_t>(position),
                                        flag_param(req, "slice"), h));
          }));

    s.Post(R"(/sessions/([^/]+)/selection)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const json body = body_json(req);
        const auto ids = body.value("ids", std::vector<long>{});
        const auto origin = body.value("origin", std::string());
        const auto rev = svc.set_selection(req.matches[1], ids, origin);
        reply(res, {{"revision", rev}});
    }));

    s.Get(R"(/sessions/([^/]+)/selection)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.get_selection(req.matches[1]));
    }));

    s.Get(R"(/sessions/([^/]+)/export)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto bundle = svc.export_results(req.matches[1]);
        if (param(req, "format") == "csv") {
            res.set_content(bundle.assignments_csv, "text/csv");
            return;
        }
        reply(res, {{"assignments_csv", bundle.assignments_csv}, {"settings", bundle.settings}});
    }));

    s.Get(R"(/sessions/([^/]+)/events)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto after = static_cast<std::uint64_t>(int_param(req, "after", 0));
        const auto timeout = std::chrono::milliseconds(int_param(req, "timeout_ms", 0));
        json out = json::array();
        for (const auto& e : svc.events_after(req.matches[1], after, timeout)) out.push_back(event_json(e));
        reply(res, {{"events", std::move(out)}});
    }));

    s.Get(R"(/sessions/([^/]+)/events/stream)",
          guarded([this, &svc](const httplib::Request& req, httplib::Response& res) {
              const std::string id = req.matches[1];
              svc.revision(id); // 404 for unknown sessions
              std::uint64_t start = static_cast<std::uint64_t>(int_param(req, "after", 0));
              if (req.has_header("Last-Event-ID")) start = std::stoull(req.get_header_value("Last-Event-ID"));
              auto cursor = std::make_shared<std::uint64_t>(start);
              res.set_chunked_content_provider(
                  "text/event-stream", [this, &svc, id, cursor](std::size_t, httplib::DataSink& sink) {
                      if (stopping_) {
                          sink.done();
                          return true;
                      }
                      std::vector<Event> events;
                      try {
                          events = svc.events_after(id, *cursor, std::chrono::milliseconds(500));
                      } catch (const std::exception&) {
                          sink.done();
                          return true;
                      }
                      std::string chunk;
                      for (const auto& e : events) {
                          chunk += "id: " + std::to_string(e.seq) + "\nevent: " + e.type +
                                   "\ndata: " + event_json(e).dump() + "\n\n";
                          *cursor = e.seq;
                      }
                      if (chunk.empty()) chunk = ": keepalive\n\n";
                      return sink.write(chunk.data(), chunk.size());
                  });
          }));
}

} // namespace twinspace::session
