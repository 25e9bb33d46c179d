#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lightretriever/bench.hpp"
#include "lightretriever/dense_index.hpp"
#include "lightretriever/engine.hpp"
#include "lightretriever/error.hpp"
#include "lightretriever/eval.hpp"
#include "lightretriever/io.hpp"
#include "lightretriever/query_encoder.hpp"
#include "lightretriever/selfcheck.hpp"
#include "lightretriever/service.hpp"
#include "lightretriever/sparse_index.hpp"

namespace lr = lightretriever;

namespace {

// exit codes: 0 ok, 1 runtime error, 2 usage error, 3 empty query
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitEmptyQuery = 3;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value strings
};

lr::EngineConfig load_config(const CommonOpts& opts) {
    std::string path = opts.config_path;
    if (path.empty())
        if (const char* env = std::getenv("LIGHTRETRIEVE_CONFIG")) path = env;
    lr::EngineConfig cfg;
    if (!path.empty()) cfg = lr::EngineConfig::from_file(path);
    std::map<std::string, std::string> parsed;
    for (const auto& kv : opts.overrides) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw lr::ConfigError("--set expects key=value, got \"" + kv + "\"");
        parsed[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    cfg.apply_overrides(parsed);
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path,
                    "engine config file (fallback: $LIGHTRETRIEVE_CONFIG)");
    cmd->add_option("--set", opts.overrides,
                    "config override key=value (repeatable, wins over the file)");
}

void print_hits(const lr::SearchResult& result) {
    for (const auto& h : result.hits)
        std::printf("%4d  %-24s  %.6f\n", h.rank, h.doc_id.c_str(), h.score);
    std::printf("# %zu hits, tokenize %.3f ms, encode %.3f ms, search %.3f ms", result.hits.size(),
                result.timings.tokenize_s * 1e3, result.timings.encode_s * 1e3,
                result.timings.search_s * 1e3);
    if (result.skipped_chars > 0) std::printf(", %zu chars skipped", result.skipped_chars);
    std::printf("\n");
}

std::vector<size_t> parse_ks(const std::string& spec) {
    std::vector<size_t> ks;
    size_t start = 0;
    while (start <= spec.size()) {
        size_t comma = spec.find(',', start);
        const std::string piece =
            comma == std::string::npos ? spec.substr(start) : spec.substr(start, comma - start);
        if (!piece.empty()) ks.push_back(std::stoull(piece));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (ks.empty()) throw lr::InvalidArgument("no cutoffs in \"" + spec + "\"");
    return ks;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lightretrieve: hybrid dense+sparse retrieval engine"};
    app.require_subcommand(1);

    CommonOpts opts;

    // index-dense
    auto* index_dense = app.add_subcommand("index-dense", "build a dense index from LREM vectors");
    std::string in_matrix, in_ids, out_dir;
    size_t k_dims = 0;
    index_dense->add_option("--input", in_matrix, "LREM matrix of document vectors")->required();
    index_dense->add_option("--ids", in_ids, "sidecar ids file (one per line)")->required();
    index_dense->add_option("--k-dims", k_dims, "keep only the first k dimensions (0 = all)");
    index_dense->add_option("--out", out_dir, "output index directory")->required();

    // index-sparse
    auto* index_sparse =
        app.add_subcommand("index-sparse", "build an inverted impact index from JSONL docs");
    std::string in_jsonl, vocab_path;
    size_t k_terms = 0;
    index_sparse->add_option("--input", in_jsonl, "JSONL sparse docs")->required();
    index_sparse->add_option("--vocab", vocab_path, "vocabulary file (defines V)")->required();
    index_sparse->add_option("--k-terms", k_terms, "keep only the k largest-impact terms (0 = all)");
    index_sparse->add_option("--out", out_dir, "output index directory")->required();

    // search
    auto* search = app.add_subcommand("search", "run one query against the loaded indexes");
    add_common(search, opts);
    std::string query_text, mode_str = "hybrid";
    size_t top_k = 0;
    double alpha = -1.0;
    search->add_option("--query", query_text, "query text")->required();
    search->add_option("--mode", mode_str, "dense | sparse | hybrid");
    search->add_option("--top-k", top_k, "results to return (default: config top_k)");
    search->add_option("--alpha", alpha, "hybrid dense weight override");

    // serve
    auto* serve = app.add_subcommand("serve", "run the HTTP search service");
    add_common(serve, opts);
    std::string bind_addr = "127.0.0.1:8080";
    serve->add_option("--bind", bind_addr, "host:port to bind");

    // bench
    auto* bench = app.add_subcommand("bench", "phase-isolated latency benchmark");
    add_common(bench, opts);
    std::string queries_path, bench_json;
    size_t repetitions = 1, batch_size = 256;
    bench->add_option("--queries", queries_path, "queries file, one per line")->required();
    bench->add_option("--mode", mode_str, "dense | sparse | hybrid");
    bench->add_option("--repetitions", repetitions, "timing repetitions");
    bench->add_option("--batch-size", batch_size, "encode batch size");
    bench->add_option("--json", bench_json, "also write the report as JSON");

    // eval
    auto* eval = app.add_subcommand("eval", "score a TREC run against qrels");
    std::string run_path, qrels_path, ks_spec = "10,20,50,100", eval_json;
    eval->add_option("--run", run_path, "run file")->required();
    eval->add_option("--qrels", qrels_path, "qrels file")->required();
    eval->add_option("--k", ks_spec, "comma-separated cutoffs");
    eval->add_option("--json", eval_json, "also write the report as JSON");

    // selfcheck
    auto* selfcheck = app.add_subcommand("selfcheck", "run the training-numerics property suite");

    // estimate-size
    auto* estimate = app.add_subcommand("estimate-size", "lookup-table RAM footprint in MB");
    size_t est_vocab = 0, est_dim = 0;
    std::string est_dtype = "f16";
    estimate->add_option("--vocab-size", est_vocab, "vocabulary size V")->required();
    estimate->add_option("--dim", est_dim, "vector dimension H")->required();
    estimate->add_option("--dtype", est_dtype, "f16 | f32");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*index_dense) {
            auto docs = lr::read_dense_docs(in_matrix, in_ids);
            const size_t dims = k_dims == 0 ? docs.at(0).vector.size() : k_dims;
            auto index = lr::build_dense_index(docs, dims);
            lr::save_dense_index(index, out_dir);
            std::printf("dense index: %zu docs, dim %zu -> %s\n", index.size(), index.dim,
                        out_dir.c_str());
        } else if (*index_sparse) {
            auto vocab = lr::load_vocab(vocab_path);
            auto docs = lr::read_sparse_docs(in_jsonl, vocab.size());
            auto index = lr::build_sparse_index(docs, vocab.size(), k_terms);
            lr::save_sparse_index(index, out_dir);
            std::printf("sparse index: %zu docs, vocab %zu -> %s\n", index.doc_count(),
                        index.vocab_size, out_dir.c_str());
        } else if (*search) {
            lr::SearchMode mode;
            try {
                mode = lr::parse_mode(mode_str);
            } catch (const lr::InvalidArgument& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return kExitUsage;
            }
            const lr::Engine engine(load_config(opts));
            const size_t k = top_k == 0 ? engine.config().top_k : top_k;
            std::optional<double> alpha_opt;
            if (alpha >= 0.0) alpha_opt = alpha;
            print_hits(engine.search(query_text, mode, k, alpha_opt));
        } else if (*serve) {
            const size_t colon = bind_addr.rfind(':');
            if (colon == std::string::npos) {
                std::fprintf(stderr, "error: --bind expects host:port\n");
                return kExitUsage;
            }
            const lr::Engine engine(load_config(opts));
            lr::SearchService service(engine, /*log_requests=*/true);
            return service.run(bind_addr.substr(0, colon),
                               std::stoi(bind_addr.substr(colon + 1)));
        } else if (*bench) {
            lr::SearchMode mode;
            try {
                mode = lr::parse_mode(mode_str);
            } catch (const lr::InvalidArgument& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return kExitUsage;
            }
            const lr::Engine engine(load_config(opts));
            const auto report = lr::run_bench(engine, lr::load_query_lines(queries_path), mode,
                                              repetitions, batch_size);
            std::fputs(report.to_text().c_str(), stdout);
            if (!bench_json.empty()) {
                std::ofstream out(bench_json);
                out << report.to_json() << '\n';
            }
        } else if (*eval) {
            const auto report =
                lr::evaluate_run(lr::read_run(run_path), lr::read_qrels(qrels_path),
                                 parse_ks(ks_spec));
            std::fputs(report.to_table().c_str(), stdout);
            if (!eval_json.empty()) {
                std::ofstream out(eval_json);
                out << report.to_json() << '\n';
            }
        } else if (*selfcheck) {
            const auto results = lr::run_selfcheck();
            for (const auto& r : results)
                std::printf("[%s] %-32s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                            r.detail.c_str());
            if (!lr::all_passed(results)) return kExitError;
        } else if (*estimate) {
            lr::Dtype dtype;
            if (est_dtype == "f16") dtype = lr::Dtype::f16;
            else if (est_dtype == "f32") dtype = lr::Dtype::f32;
            else {
                std::fprintf(stderr, "error: --dtype must be f16 or f32\n");
                return kExitUsage;
            }
            std::printf("%.2f MB\n", lr::estimate_serving_size(est_vocab, est_dim, dtype));
        }
    } catch (const lr::EmptyQueryError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitEmptyQuery;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return 0;
}
