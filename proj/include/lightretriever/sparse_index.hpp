#pragma once

#include <string>
#include <vector>

#include "lightretriever/types.hpp"

namespace lightretriever {

struct Posting {
    int32_t doc_ordinal = 0;
    float impact = 0.0f;
};

// Inverted impact index. Posting lists are ordered by doc ordinal; immutable
// after build, searchers own their accumulators.
struct SparseIndex {
    size_t vocab_size = 0;
    std::vector<std::vector<Posting>> postings;  // indexed by token id
    std::vector<std::string> ids;                // ordinal -> doc id
    uint64_t build_digest = 0;

    size_t doc_count() const { return ids.size(); }
};

// Keeps the k_terms largest-impact entries (ties keep the smaller token id),
// output re-sorted by token id. Identity when nnz <= k_terms.
SparseDoc truncate_top_terms(const SparseDoc& doc, size_t k_terms);

// k_terms == 0 means no truncation.
SparseIndex build_sparse_index(const std::vector<SparseDoc>& docs, size_t vocab_size,
                               size_t k_terms = 0);

// Term-at-a-time impact search: score(q, d) = sum_t count_q(t) * impact_d(t).
// Documents with no overlapping term are never returned.
std::vector<Hit> search_sparse(const SparseIndex& index, const SparseQueryVector& query,
                               size_t top_k);

// Reconstructs the (truncated) documents, sorted entries per doc.
std::vector<SparseDoc> sparse_index_docs(const SparseIndex& index);

// Directory layout: docs.jsonl (post-truncation) + manifest.txt.
void save_sparse_index(const SparseIndex& index, const std::string& dir);
SparseIndex load_sparse_index(const std::string& dir);

}  // namespace lightretriever
