#pragma once

#include <span>
#include <string>
#include <vector>

#include "lightretriever/types.hpp"

namespace lightretriever {

// Flat exact maximum-inner-product index. Immutable after build; any number
// of threads may search concurrently.
struct DenseIndex {
    size_t dim = 0;
    std::vector<float> matrix;  // N x dim, row-major, input order
    std::vector<std::string> ids;
    uint64_t build_digest = 0;

    size_t size() const { return ids.size(); }
    const float* row(size_t i) const { return matrix.data() + i * dim; }
};

// Stores the first k_dims components of every document vector. All documents
// must share one dimension >= k_dims and carry unique ids.
DenseIndex build_dense_index(const std::vector<DenseDoc>& docs, size_t k_dims);

// Exact top-k by inner product. Per-row scores accumulate in f64 and round
// to f32; ties break by doc id ascending. Returns min(top_k, N) hits.
std::vector<Hit> search_dense(const DenseIndex& index, const DenseQueryVector& query, size_t top_k);

// Directory layout: matrix.lrem + ids.txt + manifest.txt. Rebuilding from
// identical inputs reproduces the manifest byte for byte.
void save_dense_index(const DenseIndex& index, const std::string& dir);
DenseIndex load_dense_index(const std::string& dir);

}  // namespace lightretriever
