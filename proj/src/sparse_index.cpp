#include "lightretriever/sparse_index.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "lightretriever/error.hpp"
#include "lightretriever/io.hpp"
#include "hash_util.hpp"
#include "top_k.hpp"

namespace lightretriever {

namespace fs = std::filesystem;

namespace {

uint64_t compute_digest(const SparseIndex& index) {
    detail::Fnv1a h;
    h.update_value(index.vocab_size);
    h.update_value(index.ids.size());
    for (const auto& id : index.ids) {
        h.update(id);
        h.update("\0", 1);
    }
    for (size_t t = 0; t < index.postings.size(); ++t) {
        if (index.postings[t].empty()) continue;
        h.update_value(t);
        for (const auto& p : index.postings[t]) {
            h.update_value(p.doc_ordinal);
            h.update_value(p.impact);
        }
    }
    return h.digest();
}

}  // namespace

SparseDoc truncate_top_terms(const SparseDoc& doc, size_t k_terms) {
    if (k_terms == 0) throw InvalidArgument("truncate_top_terms: k_terms must be >= 1");
    if (doc.weights.size() <= k_terms) return doc;

    SparseDoc out;
    out.id = doc.id;
    out.weights = doc.weights;
    // larger impact first; equal impacts keep the smaller token id
    std::sort(out.weights.begin(), out.weights.end(), [](const SparseEntry& a, const SparseEntry& b) {
        if (a.impact != b.impact) return a.impact > b.impact;
        return a.token < b.token;
    });
    out.weights.resize(k_terms);
    std::sort(out.weights.begin(), out.weights.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.token < b.token; });
    return out;
}

SparseIndex build_sparse_index(const std::vector<SparseDoc>& docs, size_t vocab_size,
                               size_t k_terms) {
    if (vocab_size == 0) throw InvalidArgument("build_sparse_index: vocab_size must be >= 1");
    SparseIndex index;
    index.vocab_size = vocab_size;
    index.postings.resize(vocab_size);
    index.ids.reserve(docs.size());

    std::unordered_set<std::string> seen;
    seen.reserve(docs.size());
    for (const auto& doc : docs) {
        if (!seen.insert(doc.id).second)
            throw InvalidArgument("build_sparse_index: duplicate doc id " + doc.id);
        const SparseDoc truncated = k_terms > 0 ? truncate_top_terms(doc, k_terms) : doc;
        const int32_t ordinal = static_cast<int32_t>(index.ids.size());
        for (const auto& e : truncated.weights) {
            if (e.token < 0 || static_cast<size_t>(e.token) >= vocab_size)
                throw InvalidArgument("build_sparse_index: token id " + std::to_string(e.token) +
                                      " >= vocab size in doc " + doc.id);
            if (!(e.impact > 0.0f))
                throw InvalidArgument("build_sparse_index: non-positive impact in doc " + doc.id);
            index.postings[static_cast<size_t>(e.token)].push_back({ordinal, e.impact});
        }
        index.ids.push_back(doc.id);
    }
    // doc ordinals are appended in increasing order, so lists are sorted
    index.build_digest = compute_digest(index);
    return index;
}

std::vector<Hit> search_sparse(const SparseIndex& index, const SparseQueryVector& query,
                               size_t top_k) {
    if (top_k == 0) throw InvalidArgument("search_sparse: top_k must be >= 1");
    for (const auto& [token, count] : query.entries)
        if (token < 0 || static_cast<size_t>(token) >= index.vocab_size)
            throw InvalidArgument("search_sparse: query token id " + std::to_string(token) +
                                  " >= vocab size " + std::to_string(index.vocab_size));
    if (query.entries.empty()) return {};

    // Term-at-a-time accumulation over a doc-count-sized array.
    std::vector<double> acc(index.doc_count(), 0.0);
    std::vector<uint8_t> touched(index.doc_count(), 0);
    std::vector<size_t> candidates;
    for (const auto& [token, count] : query.entries) {
        const double weight = static_cast<double>(count);
        for (const auto& p : index.postings[static_cast<size_t>(token)]) {
            const auto ord = static_cast<size_t>(p.doc_ordinal);
            acc[ord] += weight * static_cast<double>(p.impact);
            if (!touched[ord]) {
                touched[ord] = 1;
                candidates.push_back(ord);
            }
        }
    }

    detail::TopKSelector selector(top_k, index.ids);
    // candidate order does not matter; scores round to f32 like dense search
    for (size_t ord : candidates) selector.offer(ord, static_cast<float>(acc[ord]));
    return selector.take();
}

std::vector<SparseDoc> sparse_index_docs(const SparseIndex& index) {
    std::vector<SparseDoc> docs(index.doc_count());
    for (size_t i = 0; i < docs.size(); ++i) docs[i].id = index.ids[i];
    for (size_t t = 0; t < index.postings.size(); ++t)
        for (const auto& p : index.postings[t])
            docs[static_cast<size_t>(p.doc_ordinal)].weights.push_back(
                {static_cast<TokenId>(t), p.impact});
    // postings walk token ids in order, so per-doc entries are already sorted
    return docs;
}

void save_sparse_index(const SparseIndex& index, const std::string& dir) {
    fs::create_directories(dir);
    write_sparse_docs(sparse_index_docs(index), (fs::path(dir) / "docs.jsonl").string());
    std::ofstream manifest((fs::path(dir) / "manifest.txt").string());
    if (!manifest) throw FormatError("cannot write manifest to " + dir);
    manifest << "type=sparse\n"
             << "vocab_size=" << index.vocab_size << '\n'
             << "count=" << index.doc_count() << '\n'
             << "digest=" << std::hex << index.build_digest << std::dec << '\n';
}

SparseIndex load_sparse_index(const std::string& dir) {
    std::string manifest_path = (fs::path(dir) / "manifest.txt").string();
    std::ifstream manifest(manifest_path);
    if (!manifest) throw FormatError("cannot open " + manifest_path);
    size_t vocab_size = 0;
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.rfind("vocab_size=", 0) == 0) vocab_size = std::stoull(line.substr(11));
    }
    if (vocab_size == 0) throw FormatError(manifest_path + ": missing vocab_size");
    auto docs = read_sparse_docs((fs::path(dir) / "docs.jsonl").string(), vocab_size);
    return build_sparse_index(docs, vocab_size);
}

}  // namespace lightretriever
