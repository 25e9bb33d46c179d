#include "lightretriever/engine.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "lightretriever/error.hpp"
#include "lightretriever/io.hpp"
#include "lightretriever/query_encoder.hpp"

namespace lightretriever {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key " + key + ": expected true/false, got \"" + value + "\"");
}

void set_key(EngineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "vocab_path") cfg.vocab_path = value;
    else if (key == "table_path") cfg.table_path = value;
    else if (key == "dense_index_path") cfg.dense_index_path = value;
    else if (key == "sparse_index_path") cfg.sparse_index_path = value;
    else if (key == "alpha") cfg.alpha = std::stod(value);
    else if (key == "pool_size") cfg.pool_size = std::stoull(value);
    else if (key == "top_k") cfg.top_k = std::stoull(value);
    else if (key == "k_dims") cfg.k_dims = std::stoull(value);
    else if (key == "normalize_dense") cfg.normalize_dense = parse_bool(value, key);
    else if (key == "lowercase") cfg.lowercase = parse_bool(value, key);
    else throw ConfigError("unknown config key \"" + key + "\"");
}

}  // namespace

SearchMode parse_mode(const std::string& name) {
    if (name == "dense") return SearchMode::dense;
    if (name == "sparse") return SearchMode::sparse;
    if (name == "hybrid") return SearchMode::hybrid;
    throw InvalidArgument("unknown mode \"" + name + "\" (expected dense|sparse|hybrid)");
}

std::string mode_name(SearchMode mode) {
    switch (mode) {
        case SearchMode::dense: return "dense";
        case SearchMode::sparse: return "sparse";
        case SearchMode::hybrid: return "hybrid";
    }
    return "?";
}

EngineConfig EngineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    EngineConfig cfg;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        try {
            set_key(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const std::invalid_argument&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": bad value");
        }
    }
    return cfg;
}

void EngineConfig::apply_overrides(const std::map<std::string, std::string>& overrides) {
    for (const auto& [key, value] : overrides) set_key(*this, key, value);
}

Engine::Engine(const EngineConfig& cfg) : cfg_(cfg) {
    if (cfg_.alpha < 0.0 || cfg_.alpha > 1.0) throw ConfigError("alpha must be in [0, 1]");
    if (cfg_.vocab_path.empty()) throw ConfigError("vocab_path is required");
    vocab_ = load_vocab(cfg_.vocab_path);
    tokenizer_ = std::make_unique<Tokenizer>(vocab_);

    if (!cfg_.table_path.empty()) {
        table_ = std::make_unique<EmbeddingTable>(read_embedding_table(cfg_.table_path));
        if (table_->vocab_size != vocab_.size())
            throw ConfigError("embedding table rows (" + std::to_string(table_->vocab_size) +
                              ") != vocabulary size (" + std::to_string(vocab_.size()) + ")");
    }
    if (!cfg_.dense_index_path.empty()) {
        if (!table_) throw ConfigError("dense_index_path requires table_path");
        dense_index_ = std::make_unique<DenseIndex>(load_dense_index(cfg_.dense_index_path));
        k_dims_ = dense_index_->dim;
        if (k_dims_ > table_->dim)
            throw ConfigError("dense index dim exceeds embedding table dim");
        if (cfg_.k_dims != 0 && cfg_.k_dims != k_dims_)
            throw ConfigError("k_dims=" + std::to_string(cfg_.k_dims) +
                              " does not match dense index dim " + std::to_string(k_dims_));
    } else if (cfg_.k_dims != 0) {
        k_dims_ = cfg_.k_dims;
    }
    if (!cfg_.sparse_index_path.empty()) {
        sparse_index_ = std::make_unique<SparseIndex>(load_sparse_index(cfg_.sparse_index_path));
        if (sparse_index_->vocab_size != vocab_.size())
            throw ConfigError("sparse index vocab size (" +
                              std::to_string(sparse_index_->vocab_size) +
                              ") != vocabulary size (" + std::to_string(vocab_.size()) + ")");
    }
}

const EmbeddingTable& Engine::table() const {
    if (!table_) throw ConfigError("no embedding table loaded (table_path unset)");
    return *table_;
}

const DenseIndex& Engine::dense_index() const {
    if (!dense_index_) throw ConfigError("no dense index loaded (dense_index_path unset)");
    return *dense_index_;
}

const SparseIndex& Engine::sparse_index() const {
    if (!sparse_index_) throw ConfigError("no sparse index loaded (sparse_index_path unset)");
    return *sparse_index_;
}

DenseQueryVector Engine::encode_dense(std::span<const TokenId> ids) const {
    return encode_dense_query(ids, table(), k_dims_ ? k_dims_ : table().dim,
                              cfg_.normalize_dense);
}

SearchResult Engine::search(const std::string& query, SearchMode mode, size_t top_k,
                            std::optional<double> alpha) const {
    SearchResult result;

    auto t0 = Clock::now();
    const TokenizeResult tokens = tokenizer_->tokenize(query, cfg_.lowercase);
    result.timings.tokenize_s = seconds_since(t0);
    result.skipped_chars = tokens.skipped_chars;

    const bool needs_dense = mode != SearchMode::sparse;
    const bool needs_sparse = mode != SearchMode::dense;
    if (needs_dense && tokens.ids.empty())
        throw EmptyQueryError("query tokenized to zero known tokens");

    DenseQueryVector dense_query;
    SparseQueryVector sparse_query;
    t0 = Clock::now();
    if (needs_dense) dense_query = encode_dense(tokens.ids);
    if (needs_sparse) sparse_query = encode_sparse_query(tokens.ids);
    result.timings.encode_s = seconds_since(t0);

    t0 = Clock::now();
    switch (mode) {
        case SearchMode::dense:
            result.hits = search_dense(dense_index(), dense_query, top_k);
            break;
        case SearchMode::sparse:
            result.hits = search_sparse(sparse_index(), sparse_query, top_k);
            break;
        case SearchMode::hybrid: {
            FusionConfig fcfg;
            fcfg.alpha = alpha.value_or(cfg_.alpha);
            fcfg.pool_size = std::max(cfg_.pool_size, top_k);
            const auto dense_hits = search_dense(dense_index(), dense_query, fcfg.pool_size);
            const auto sparse_hits = search_sparse(sparse_index(), sparse_query, fcfg.pool_size);
            result.hits = fuse(dense_hits, sparse_hits, fcfg, top_k);
            break;
        }
    }
    result.timings.search_s = seconds_since(t0);
    return result;
}

}  // namespace lightretriever
