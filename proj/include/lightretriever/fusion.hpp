#pragma once

#include <vector>

#include "lightretriever/types.hpp"

namespace lightretriever {

struct FusionConfig {
    double alpha = 0.5;       // weight on the dense score
    size_t pool_size = 1000;  // candidates taken from each list before fusion
};

// Min-max normalization over the list: s' = (s - min) / (max - min).
// Degenerate lists (max == min) map every score to 1.0. Order is preserved.
std::vector<Hit> normalize_scores(const std::vector<Hit>& hits);

// Linear interpolation of per-list min-max-normalized scores:
//   fused = alpha * dense' + (1 - alpha) * sparse'
// over the union of both pools; a document absent from one list takes that
// list's normalized minimum (0.0). Both lists empty yields an empty result.
std::vector<Hit> fuse(const std::vector<Hit>& dense_hits, const std::vector<Hit>& sparse_hits,
                      const FusionConfig& cfg, size_t top_k);

}  // namespace lightretriever
