#pragma once

// Shared retrieval fixtures: a hand-checkable 3-doc corpus and a synthetic
// corpus generator used by the engine, service, CLI, and acceptance tests.

#include <string>
#include <vector>

#include "lightretriever/dense_index.hpp"
#include "lightretriever/engine.hpp"
#include "lightretriever/io.hpp"
#include "lightretriever/sparse_index.hpp"

#include "fixtures.hpp"
#include "test_rng.hpp"

namespace testsupport {

namespace lr = lightretriever;

// vocab {cat, dog, fish}, H=2. Query "cat" -> (1,0):
//   dense scores  d_cat=1.0, d_mix=0.7, d_dog=0.0
//   sparse scores d_cat=2.0, d_mix=0.5
// so "d_cat" is the hand-verified nearest doc in every mode.
struct ToyCorpus {
    TempDir dir{"toy"};
    lr::EngineConfig config;

    ToyCorpus() {
        write_text(dir.file("vocab.txt"), "cat\ndog\nfish\n");

        lr::EmbeddingTable table;
        table.vocab_size = 3;
        table.dim = 2;
        table.data = {1.0f, 0.0f, 0.0f, 1.0f, 0.5f, 0.5f};
        lr::write_embedding_table(table, dir.file("table.lrem"));

        const std::vector<lr::DenseDoc> dense_docs = {
            {"d_cat", {1.0f, 0.0f}}, {"d_dog", {0.0f, 1.0f}}, {"d_mix", {0.7f, 0.7f}}};
        lr::save_dense_index(lr::build_dense_index(dense_docs, 2), dir.file("dense_idx"));

        const std::vector<lr::SparseDoc> sparse_docs = {
            {"d_cat", {{0, 2.0f}}},
            {"d_dog", {{1, 1.5f}}},
            {"d_mix", {{0, 0.5f}, {1, 0.5f}, {2, 1.0f}}}};
        lr::save_sparse_index(lr::build_sparse_index(sparse_docs, 3), dir.file("sparse_idx"));

        config.vocab_path = dir.file("vocab.txt");
        config.table_path = dir.file("table.lrem");
        config.dense_index_path = dir.file("dense_idx");
        config.sparse_index_path = dir.file("sparse_idx");
        config.top_k = 3;
        config.pool_size = 10;
    }

    std::string write_config() const {
        std::string content;
        content += "vocab_path=" + config.vocab_path + "\n";
        content += "table_path=" + config.table_path + "\n";
        content += "dense_index_path=" + config.dense_index_path + "\n";
        content += "sparse_index_path=" + config.sparse_index_path + "\n";
        content += "top_k=3\npool_size=10\nalpha=0.5\n";
        write_text(dir.file("engine.cfg"), content);
        return dir.file("engine.cfg");
    }
};

// Randomized corpus: numbered-token vocabulary, random embedding table,
// dense doc vectors and sparse docs, plus query strings built by joining
// vocabulary tokens with spaces.
struct SyntheticCorpus {
    std::vector<std::string> tokens;
    lr::EmbeddingTable table;
    std::vector<lr::DenseDoc> dense_docs;
    std::vector<lr::SparseDoc> sparse_docs;
    std::vector<std::string> queries;
};

inline SyntheticCorpus make_synthetic(Rng& rng, size_t vocab, size_t dim, size_t n_docs,
                                      size_t n_queries, size_t query_tokens, size_t doc_nnz) {
    SyntheticCorpus c;
    c.tokens = numbered_tokens(vocab);
    c.table = random_table(vocab, dim, rng);

    c.dense_docs.resize(n_docs);
    c.sparse_docs.resize(n_docs);
    for (size_t i = 0; i < n_docs; ++i) {
        const std::string id = "doc" + std::to_string(i);
        c.dense_docs[i] = {id, rng.floats(dim)};
        c.sparse_docs[i].id = id;
        auto token_ids = rng.sample(vocab, doc_nnz);
        std::sort(token_ids.begin(), token_ids.end());
        for (size_t t : token_ids)
            c.sparse_docs[i].weights.push_back(
                {static_cast<lr::TokenId>(t), static_cast<float>(rng.uniform(0.05, 2.0))});
    }

    c.queries.resize(n_queries);
    for (size_t q = 0; q < n_queries; ++q) {
        std::string text;
        for (size_t j = 0; j < query_tokens; ++j) {
            if (j > 0) text += ' ';
            text += c.tokens[rng.index(vocab)];
        }
        c.queries[q] = text;
    }
    return c;
}

// Persists a synthetic corpus and returns a ready config.
inline lr::EngineConfig persist_corpus(const SyntheticCorpus& c, const TempDir& dir,
                                       size_t k_dims = 0, size_t k_terms = 0) {
    std::string vocab_text;
    for (const auto& t : c.tokens) vocab_text += t + "\n";
    write_text(dir.file("vocab.txt"), vocab_text);
    lr::write_embedding_table(c.table, dir.file("table.lrem"));
    lr::save_dense_index(
        lr::build_dense_index(c.dense_docs, k_dims == 0 ? c.table.dim : k_dims),
        dir.file("dense_idx"));
    lr::save_sparse_index(lr::build_sparse_index(c.sparse_docs, c.tokens.size(), k_terms),
                          dir.file("sparse_idx"));

    lr::EngineConfig cfg;
    cfg.vocab_path = dir.file("vocab.txt");
    cfg.table_path = dir.file("table.lrem");
    cfg.dense_index_path = dir.file("dense_idx");
    cfg.sparse_index_path = dir.file("sparse_idx");
    return cfg;
}

}  // namespace testsupport
