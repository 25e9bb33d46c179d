#pragma once

#include <span>
#include <vector>

#include "lightretriever/types.hpp"

namespace lightretriever {

// Dense query vector = mean of the cached token rows, truncated to the first
// k_dims components, optionally L2-normalized. Components are summed in f64
// and divided by the token count before truncation.
DenseQueryVector encode_dense_query(std::span<const TokenId> token_ids, const EmbeddingTable& table,
                                    size_t k_dims, bool normalize = false);

// Sparse query vector = per-token occurrence counts, sorted by token id.
SparseQueryVector encode_sparse_query(std::span<const TokenId> token_ids);

// First k components of v. k must be in [1, dim(v)].
std::vector<float> truncate_dims(std::span<const float> v, size_t k);

// RAM footprint of a V x H lookup table in decimal megabytes (1 MB = 10^6
// bytes), rounded to two decimals.
double estimate_serving_size(size_t vocab_size, size_t dim, Dtype dtype);

}  // namespace lightretriever
