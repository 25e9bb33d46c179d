#pragma once

#include <string>
#include <vector>

#include "lightretriever/engine.hpp"

namespace lightretriever {

struct PhaseStats {
    double mean_s = 0.0;
    double stddev_s = 0.0;
    std::vector<double> samples_s;  // one per repetition
};

struct BenchReport {
    std::string mode;
    size_t query_count = 0;
    size_t dropped_queries = 0;  // tokenized to nothing, excluded up front
    size_t repetitions = 0;
    size_t batch_size = 0;
    PhaseStats tokenize;
    PhaseStats encode;
    PhaseStats search;
    PhaseStats total;  // end-to-end pipeline, measured separately
    double qps = 0.0;  // query_count / total.mean_s

    std::string to_text() const;
    std::string to_json() const;
};

// Times tokenize / encode / search in isolation over the whole query set,
// then the end-to-end pipeline, repeated `repetitions` times. Queries are
// processed in batches of batch_size (the default mirrors a 256-query
// serving batch).
BenchReport run_bench(const Engine& engine, const std::vector<std::string>& queries,
                      SearchMode mode, size_t repetitions = 1, size_t batch_size = 256);

std::vector<std::string> load_query_lines(const std::string& path);

}  // namespace lightretriever
