#pragma once

#include <memory>
#include <string>
#include <thread>

#include "lightretriever/engine.hpp"

namespace lightretriever {

// HTTP front end over an immutable Engine.
//   GET  /healthz -> {"status":"ok"}
//   POST /search  <- {"query": str, "mode": "dense"|"sparse"|"hybrid",
//                     "top_k": int?, "alpha": number?}
//                 -> {"hits": [{"doc_id", "score", "rank"}],
//                     "timings_ms": {"tokenize", "encode", "search"}}
// Errors come back as {"error": "..."} with a 4xx/5xx status.
class SearchService {
public:
    explicit SearchService(const Engine& engine, bool log_requests = false);
    ~SearchService();

    SearchService(const SearchService&) = delete;
    SearchService& operator=(const SearchService&) = delete;

    // Binds and serves on a background thread; port 0 picks a free port.
    void start(const std::string& host, int port);
    int port() const { return port_; }
    void stop();

    // Blocking variant for the CLI; returns after stop() or SIGINT/SIGTERM.
    int run(const std::string& host, int port);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread worker_;
    int port_ = 0;
};

}  // namespace lightretriever
