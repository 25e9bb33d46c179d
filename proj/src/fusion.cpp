#include "lightretriever/fusion.hpp"

#include <algorithm>
#include <map>

#include "lightretriever/error.hpp"

namespace lightretriever {

std::vector<Hit> normalize_scores(const std::vector<Hit>& hits) {
    if (hits.empty()) throw InvalidArgument("normalize_scores: empty hit list");
    double lo = hits[0].score, hi = hits[0].score;
    for (const Hit& h : hits) {
        lo = std::min(lo, h.score);
        hi = std::max(hi, h.score);
    }
    std::vector<Hit> out = hits;
    if (hi == lo) {
        for (Hit& h : out) h.score = 1.0;
    } else {
        const double inv = 1.0 / (hi - lo);
        for (Hit& h : out) h.score = (h.score - lo) * inv;
    }
    for (size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
    return out;
}

std::vector<Hit> fuse(const std::vector<Hit>& dense_hits, const std::vector<Hit>& sparse_hits,
                      const FusionConfig& cfg, size_t top_k) {
    if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
        throw InvalidArgument("fuse: alpha must be in [0, 1]");
    if (top_k == 0) throw InvalidArgument("fuse: top_k must be >= 1");
    if (cfg.pool_size < top_k)
        throw InvalidArgument("fuse: pool_size must be >= top_k");

    auto pool = [&](const std::vector<Hit>& hits) {
        std::vector<Hit> p(hits.begin(),
                           hits.begin() + static_cast<ptrdiff_t>(std::min(cfg.pool_size, hits.size())));
        return p.empty() ? p : normalize_scores(p);
    };
    const std::vector<Hit> dense = pool(dense_hits);
    const std::vector<Hit> sparse = pool(sparse_hits);
    if (dense.empty() && sparse.empty()) return {};

    // absent from a list -> that list's normalized minimum, which is 0
    struct Pair {
        double dense = 0.0;
        double sparse = 0.0;
    };
    std::map<std::string, Pair> candidates;
    for (const Hit& h : dense) candidates[h.doc_id].dense = h.score;
    for (const Hit& h : sparse) candidates[h.doc_id].sparse = h.score;

    std::vector<Hit> fused;
    fused.reserve(candidates.size());
    for (const auto& [id, p] : candidates)
        fused.push_back(Hit{id, cfg.alpha * p.dense + (1.0 - cfg.alpha) * p.sparse, 0});
    std::sort(fused.begin(), fused.end(), hit_before);
    if (fused.size() > top_k) fused.resize(top_k);
    for (size_t i = 0; i < fused.size(); ++i) fused[i].rank = static_cast<int>(i) + 1;
    return fused;
}

}  // namespace lightretriever
