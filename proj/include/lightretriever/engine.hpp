#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lightretriever/dense_index.hpp"
#include "lightretriever/fusion.hpp"
#include "lightretriever/sparse_index.hpp"
#include "lightretriever/tokenizer.hpp"
#include "lightretriever/types.hpp"

namespace lightretriever {

// Raised when a dense or hybrid query tokenizes to nothing; the CLI maps it
// to its own exit code.
struct EmptyQueryError : std::runtime_error {
    explicit EmptyQueryError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class SearchMode { dense, sparse, hybrid };

SearchMode parse_mode(const std::string& name);
std::string mode_name(SearchMode mode);

// Flat key=value config; unset paths leave the corresponding retriever
// unavailable.
struct EngineConfig {
    std::string vocab_path;
    std::string table_path;
    std::string dense_index_path;
    std::string sparse_index_path;
    double alpha = 0.5;
    size_t pool_size = 1000;
    size_t top_k = 10;
    size_t k_dims = 0;  // 0 = dense index dimension
    bool normalize_dense = false;
    bool lowercase = false;

    static EngineConfig from_file(const std::string& path);
    // key=value overrides; unknown keys are rejected
    void apply_overrides(const std::map<std::string, std::string>& overrides);
};

struct PhaseTimings {
    double tokenize_s = 0.0;
    double encode_s = 0.0;
    double search_s = 0.0;
};

struct SearchResult {
    std::vector<Hit> hits;
    PhaseTimings timings;
    size_t skipped_chars = 0;
};

// Loads every configured structure up front and stays immutable afterwards;
// search never mutates engine state, so concurrent callers are fine.
class Engine {
public:
    explicit Engine(const EngineConfig& cfg);

    SearchResult search(const std::string& query, SearchMode mode, size_t top_k,
                        std::optional<double> alpha = std::nullopt) const;

    const EngineConfig& config() const { return cfg_; }
    const Vocabulary& vocab() const { return vocab_; }
    const Tokenizer& tokenizer() const { return *tokenizer_; }
    const EmbeddingTable& table() const;
    const DenseIndex& dense_index() const;
    const SparseIndex& sparse_index() const;
    bool has_dense() const { return dense_index_ != nullptr && table_ != nullptr; }
    bool has_sparse() const { return sparse_index_ != nullptr; }
    size_t dense_dims() const { return k_dims_; }

    DenseQueryVector encode_dense(std::span<const TokenId> ids) const;

private:
    EngineConfig cfg_;
    Vocabulary vocab_;
    std::unique_ptr<Tokenizer> tokenizer_;
    std::unique_ptr<EmbeddingTable> table_;
    std::unique_ptr<DenseIndex> dense_index_;
    std::unique_ptr<SparseIndex> sparse_index_;
    size_t k_dims_ = 0;
};

}  // namespace lightretriever
