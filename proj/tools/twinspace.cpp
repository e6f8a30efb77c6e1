#include "twinspace/error.hpp"
#include "twinspace/session/headless.hpp"
#include "twinspace/session/http_server.hpp"
#include "twinspace/session/service.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw twinspace::Error("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

twinspace::session::HttpServer* g_server = nullptr;

void on_signal(int)
{
    if (g_server) g_server->stop();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"twinspace: linked clustering and tour analysis"};
    app.require_subcommand(1);

    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    int port = 8080;
    std::string host = "127.0.0.1";
    serve->add_option("--port", port, "listen port (0 picks a free one)");
    serve->add_option("--host", host, "bind address");

    auto* exp = app.add_subcommand("export", "run a settings document headlessly and write results");
    std::string data, settings, out, distances;
    bool no_plots = false;
    exp->add_option("--data", data, "CSV data file")->required();
    exp->add_option("--settings", settings, "settings document")->required();
    exp->add_option("--out", out, "output directory")->required();
    exp->add_option("--distances", distances, "precomputed distance matrix CSV");
    exp->add_flag("--no-plots", no_plots, "only write assignments and settings");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) {
            twinspace::session::Service service;
            twinspace::session::HttpServer server(service);
            int bound = port;
            if (port == 0) {
                bound = server.bind_any(host);
                if (bound < 0) throw twinspace::Error("cannot bind " + host);
            } else if (!server.bind(host, port)) {
                throw twinspace::Error("cannot bind " + host + ":" + std::to_string(port));
            }
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "listening on http://" << host << ":" << bound << std::endl;
            server.serve();
            g_server = nullptr;
            return 0;
        }
        std::optional<std::string> dist;
        if (!distances.empty()) dist = slurp(distances);
        const auto bundle = twinspace::session::headless_run(slurp(data), slurp(settings), dist, !no_plots);
        twinspace::session::write_bundle(bundle, out);
        std::cout << "wrote " << out << "/assignments.csv";
        if (!bundle.plots.empty()) std::cout << " and " << bundle.plots.size() << " plot documents";
        std::cout << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
