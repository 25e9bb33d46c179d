#include "lightretriever/query_encoder.hpp"

#include <algorithm>
#include <cmath>

#include "lightretriever/error.hpp"

namespace lightretriever {

DenseQueryVector encode_dense_query(std::span<const TokenId> token_ids, const EmbeddingTable& table,
                                    size_t k_dims, bool normalize) {
    if (token_ids.empty()) throw InvalidArgument("empty query: no tokens to encode");
    if (k_dims == 0 || k_dims > table.dim)
        throw InvalidArgument("k_dims must be in [1, " + std::to_string(table.dim) + "]");
    for (TokenId t : token_ids)
        if (t < 0 || static_cast<size_t>(t) >= table.vocab_size)
            throw InvalidArgument("token id " + std::to_string(t) + " out of range [0, " +
                                  std::to_string(table.vocab_size) + ")");

    // Sum per component in f64, divide, then truncate and (optionally)
    // normalize. Full-width accumulation keeps the mean deterministic.
    std::vector<double> acc(table.dim, 0.0);
    for (TokenId t : token_ids) {
        const float* row = table.row(t);
        for (size_t j = 0; j < table.dim; ++j) acc[j] += static_cast<double>(row[j]);
    }
    const double inv_n = 1.0 / static_cast<double>(token_ids.size());

    DenseQueryVector out;
    out.values.resize(k_dims);
    for (size_t j = 0; j < k_dims; ++j) out.values[j] = static_cast<float>(acc[j] * inv_n);

    if (normalize) {
        double norm_sq = 0.0;
        for (float v : out.values) norm_sq += static_cast<double>(v) * static_cast<double>(v);
        if (norm_sq > 0.0) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (float& v : out.values) v = static_cast<float>(v * inv);
        }
        out.normalized = true;
    }
    return out;
}

SparseQueryVector encode_sparse_query(std::span<const TokenId> token_ids) {
    std::vector<TokenId> sorted(token_ids.begin(), token_ids.end());
    std::sort(sorted.begin(), sorted.end());
    SparseQueryVector out;
    for (size_t i = 0; i < sorted.size();) {
        size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        out.entries.emplace_back(sorted[i], static_cast<uint32_t>(j - i));
        i = j;
    }
    return out;
}

std::vector<float> truncate_dims(std::span<const float> v, size_t k) {
    if (k == 0 || k > v.size())
        throw InvalidArgument("truncate_dims: k must be in [1, " + std::to_string(v.size()) + "]");
    return std::vector<float>(v.begin(), v.begin() + static_cast<ptrdiff_t>(k));
}

double estimate_serving_size(size_t vocab_size, size_t dim, Dtype dtype) {
    if (vocab_size == 0 || dim == 0)
        throw InvalidArgument("estimate_serving_size: vocab_size and dim must be >= 1");
    const double bytes = static_cast<double>(vocab_size) * static_cast<double>(dim) *
                         static_cast<double>(dtype_bytes(dtype));
    return std::round(bytes / 1e6 * 100.0) / 100.0;
}

}  // namespace lightretriever
