#include "lightretriever/service.hpp"

#include <atomic>
#include <csignal>
#include <cstdio>

#include <httplib.h>
#include <json.hpp>

#include "lightretriever/error.hpp"

namespace lightretriever {

namespace {

std::atomic<httplib::Server*> g_signal_target{nullptr};

void handle_signal(int) {
    if (auto* server = g_signal_target.load()) server->stop();
}

nlohmann::ordered_json hits_to_json(const SearchResult& result) {
    nlohmann::ordered_json body;
    body["hits"] = nlohmann::ordered_json::array();
    for (const Hit& h : result.hits) {
        nlohmann::ordered_json hit;
        hit["doc_id"] = h.doc_id;
        hit["score"] = h.score;
        hit["rank"] = h.rank;
        body["hits"].push_back(std::move(hit));
    }
    body["timings_ms"] = {{"tokenize", result.timings.tokenize_s * 1e3},
                          {"encode", result.timings.encode_s * 1e3},
                          {"search", result.timings.search_s * 1e3}};
    return body;
}

void fail(httplib::Response& res, int status, const std::string& message) {
    nlohmann::json body;
    body["error"] = message;
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

}  // namespace

struct SearchService::Impl {
    const Engine& engine;
    bool log_requests;
    httplib::Server server;

    explicit Impl(const Engine& eng, bool log) : engine(eng), log_requests(log) { routes(); }

    void routes() {
        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("{\"status\":\"ok\"}", "application/json");
        });

        server.Post("/search", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object())
                return fail(res, 400, "request body must be a JSON object");
            if (!body.contains("query") || !body["query"].is_string())
                return fail(res, 400, "missing string field \"query\"");

            SearchMode mode = SearchMode::hybrid;
            if (body.contains("mode")) {
                if (!body["mode"].is_string()) return fail(res, 400, "\"mode\" must be a string");
                try {
                    mode = parse_mode(body["mode"].get<std::string>());
                } catch (const InvalidArgument& e) {
                    return fail(res, 400, e.what());
                }
            }
            size_t top_k = engine.config().top_k;
            if (body.contains("top_k")) {
                if (!body["top_k"].is_number_integer() || body["top_k"].get<int64_t>() < 1)
                    return fail(res, 400, "\"top_k\" must be a positive integer");
                top_k = body["top_k"].get<size_t>();
            }
            std::optional<double> alpha;
            if (body.contains("alpha")) {
                if (!body["alpha"].is_number()) return fail(res, 400, "\"alpha\" must be a number");
                alpha = body["alpha"].get<double>();
                if (*alpha < 0.0 || *alpha > 1.0)
                    return fail(res, 400, "\"alpha\" must be in [0, 1]");
            }

            try {
                const SearchResult result =
                    engine.search(body["query"].get<std::string>(), mode, top_k, alpha);
                res.set_content(hits_to_json(result).dump(), "application/json");
                if (log_requests)
                    std::fprintf(stderr,
                                 "POST /search mode=%s hits=%zu tokenize=%.3fms encode=%.3fms "
                                 "search=%.3fms\n",
                                 mode_name(mode).c_str(), result.hits.size(),
                                 result.timings.tokenize_s * 1e3, result.timings.encode_s * 1e3,
                                 result.timings.search_s * 1e3);
            } catch (const EmptyQueryError& e) {
                fail(res, 400, e.what());
            } catch (const InvalidArgument& e) {
                fail(res, 400, e.what());
            } catch (const std::exception& e) {
                fail(res, 500, e.what());
            }
        });
    }
};

SearchService::SearchService(const Engine& engine, bool log_requests)
    : impl_(std::make_unique<Impl>(engine, log_requests)) {}

SearchService::~SearchService() { stop(); }

void SearchService::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        if (port_ < 0) throw ConfigError("cannot bind to " + host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            throw ConfigError("cannot bind to " + host + ":" + std::to_string(port));
        port_ = port;
    }
    worker_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void SearchService::stop() {
    impl_->server.stop();
    if (worker_.joinable()) worker_.join();
}

int SearchService::run(const std::string& host, int port) {
    if (!impl_->server.bind_to_port(host, port)) {
        std::fprintf(stderr, "cannot bind to %s:%d\n", host.c_str(), port);
        return 1;
    }
    port_ = port;
    g_signal_target.store(&impl_->server);
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::fprintf(stderr, "serving on %s:%d\n", host.c_str(), port);
    const bool ok = impl_->server.listen_after_bind();
    g_signal_target.store(nullptr);
    return ok ? 0 : 1;
}

}  // namespace lightretriever
