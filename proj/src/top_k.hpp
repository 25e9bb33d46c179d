#pragma once

#include <queue>
#include <string>
#include <vector>

#include "lightretriever/types.hpp"

namespace lightretriever::detail {

// Keeps the best top_k (score desc, doc id asc) candidates offered to it and
// emits ranked Hits. Candidates are referenced by ordinal into an id table
// that must outlive the selector.
class TopKSelector {
public:
    TopKSelector(size_t top_k, const std::vector<std::string>& ids)
        : top_k_(top_k), heap_(Cmp{&ids}), ids_(&ids) {}

    void offer(size_t ordinal, double score) {
        if (heap_.size() < top_k_) {
            heap_.push({score, ordinal});
        } else if (Cmp{ids_}.better({score, ordinal}, heap_.top())) {
            heap_.pop();
            heap_.push({score, ordinal});
        }
    }

    std::vector<Hit> take() {
        std::vector<Hit> hits(heap_.size());
        for (size_t i = heap_.size(); i-- > 0;) {
            const auto& c = heap_.top();
            hits[i] = Hit{(*ids_)[c.ordinal], c.score, static_cast<int>(i) + 1};
            heap_.pop();
        }
        return hits;
    }

private:
    struct Candidate {
        double score;
        size_t ordinal;
    };
    struct Cmp {
        const std::vector<std::string>* ids;
        bool better(const Candidate& a, const Candidate& b) const {
            if (a.score != b.score) return a.score > b.score;
            return (*ids)[a.ordinal] < (*ids)[b.ordinal];
        }
        // priority_queue keeps the WORST candidate on top
        bool operator()(const Candidate& a, const Candidate& b) const { return better(a, b); }
    };

    size_t top_k_;
    std::priority_queue<Candidate, std::vector<Candidate>, Cmp> heap_;
    const std::vector<std::string>* ids_;
};

}  // namespace lightretriever::detail
