#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lightretriever {

using TokenId = int32_t;

enum class Dtype : uint8_t { f32 = 0, f16 = 1 };

inline size_t dtype_bytes(Dtype d) { return d == Dtype::f16 ? 2 : 4; }

// One scored retrieval result. Within a list, scores are non-increasing,
// ties are broken by doc_id ascending, and ranks are dense from 1.
struct Hit {
    std::string doc_id;
    double score = 0.0;
    int rank = 0;

    bool operator==(const Hit&) const = default;
};

// Orders hits best-first: higher score wins, equal scores fall back to doc_id.
inline bool hit_before(const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

struct SparseEntry {
    TokenId token = 0;
    float impact = 0.0f;

    bool operator==(const SparseEntry&) const = default;
};

// Learned sparse document vector: (token, impact) pairs sorted by token id,
// impacts strictly positive.
struct SparseDoc {
    std::string id;
    std::vector<SparseEntry> weights;

    bool operator==(const SparseDoc&) const = default;
};

struct DenseDoc {
    std::string id;
    std::vector<float> vector;

    bool operator==(const DenseDoc&) const = default;
};

// Token strings with implicit dense ids: token at position i has id i.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> tokens);

    size_t size() const { return tokens_.size(); }
    const std::string& token(TokenId id) const { return tokens_.at(static_cast<size_t>(id)); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    // -1 when the string is not a vocabulary entry.
    TokenId id_of(const std::string& token) const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> index_;
};

// The served dense query encoder: row t holds the cached vector of token t.
// Stored values may be f16 on disk; in memory everything is widened to f32.
struct EmbeddingTable {
    size_t vocab_size = 0;
    size_t dim = 0;
    Dtype dtype = Dtype::f32;
    std::vector<float> data;  // vocab_size x dim, row-major
    uint64_t instruction_digest = 0;

    const float* row(TokenId t) const { return data.data() + static_cast<size_t>(t) * dim; }
};

// FNV-1a over the task-instruction string; tables built for different
// instructions must not be mixed.
uint64_t instruction_digest(const std::string& instruction);

// (query-id, doc-id) -> integer relevance >= 0.
struct Qrels {
    std::map<std::string, std::map<std::string, int>> judgments;

    int relevance(const std::string& qid, const std::string& did) const {
        auto q = judgments.find(qid);
        if (q == judgments.end()) return 0;
        auto d = q->second.find(did);
        return d == q->second.end() ? 0 : d->second;
    }
};

// Ranked result lists keyed by query id.
struct RunFile {
    std::map<std::string, std::vector<Hit>> queries;
};

struct DenseQueryVector {
    std::vector<float> values;
    bool normalized = false;
};

// Query-side sparse vector: token counts, sorted by token id.
struct SparseQueryVector {
    std::vector<std::pair<TokenId, uint32_t>> entries;

    bool operator==(const SparseQueryVector&) const = default;
};

}  // namespace lightretriever
