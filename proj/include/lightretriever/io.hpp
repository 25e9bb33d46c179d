#pragma once

#include <string>
#include <vector>

#include "lightretriever/types.hpp"

namespace lightretriever {

// One token per line, id = zero-based line index. Rejects duplicates and
// empty tokens (a trailing newline is not a token).
Vocabulary load_vocab(const std::string& path);

// LREM binary matrix: magic "LREM", u32 LE version=1, u64 LE rows,
// u64 LE dim, u8 dtype (0=f32 LE, 1=f16 LE), 7 zero bytes, then rows*dim
// values row-major. f16 payloads are widened to f32 on load.
struct LremMatrix {
    size_t rows = 0;
    size_t dim = 0;
    Dtype dtype = Dtype::f32;
    std::vector<float> data;  // rows x dim
};

LremMatrix read_lrem(const std::string& path);
void write_lrem(const std::string& path, const float* data, size_t rows, size_t dim, Dtype dtype);

EmbeddingTable read_embedding_table(const std::string& path);
void write_embedding_table(const EmbeddingTable& table, const std::string& path);

// Dense documents: an LREM matrix plus an ids sidecar (one id per line,
// line i <-> row i).
std::vector<DenseDoc> read_dense_docs(const std::string& table_path, const std::string& ids_path);
void write_dense_docs(const std::vector<DenseDoc>& docs, const std::string& table_path,
                      const std::string& ids_path, Dtype dtype = Dtype::f32);

std::vector<std::string> read_id_lines(const std::string& path, size_t expected_count);

// JSONL sparse docs, one object per line:
//   {"id": "...", "weights": {"<token_id>": impact, ...}}
// Impacts must be finite and non-negative; zeros are dropped. When
// vocab_size > 0, token ids are range-checked against it.
std::vector<SparseDoc> read_sparse_docs(const std::string& path, size_t vocab_size = 0);
void write_sparse_docs(const std::vector<SparseDoc>& docs, const std::string& path);

// TREC qrels: "qid 0 docid rel", rel integer >= 0.
Qrels read_qrels(const std::string& path);
void write_qrels(const Qrels& qrels, const std::string& path);

// TREC run: "qid Q0 docid rank score tag". Per query, ranks must be dense
// from 1, scores non-increasing, and equal scores ordered by doc id.
RunFile read_run(const std::string& path);
void write_run(const RunFile& run, const std::string& path, const std::string& tag = "lightretriever");

}  // namespace lightretriever
