#include "lightretriever/dense_index.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>
#include <unordered_set>

#include "lightretriever/error.hpp"
#include "lightretriever/io.hpp"
#include "hash_util.hpp"
#include "top_k.hpp"

namespace lightretriever {

namespace fs = std::filesystem;

namespace {

uint64_t compute_digest(const DenseIndex& index) {
    detail::Fnv1a h;
    h.update_value(index.dim);
    h.update_value(index.ids.size());
    for (const auto& id : index.ids) {
        h.update(id);
        h.update("\0", 1);
    }
    h.update(index.matrix.data(), index.matrix.size() * sizeof(float));
    return h.digest();
}

// Inner product with f64 accumulation, rounded to f32.
float dot_f32(const float* a, const float* b, size_t dim) {
    double acc = 0.0;
    for (size_t i = 0; i < dim; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return static_cast<float>(acc);
}

}  // namespace

DenseIndex build_dense_index(const std::vector<DenseDoc>& docs, size_t k_dims) {
    if (docs.empty()) throw InvalidArgument("build_dense_index: no documents");
    if (k_dims == 0) throw InvalidArgument("build_dense_index: k_dims must be >= 1");
    const size_t dim = docs[0].vector.size();
    if (k_dims > dim)
        throw InvalidArgument("build_dense_index: k_dims " + std::to_string(k_dims) +
                              " exceeds document dimension " + std::to_string(dim));

    DenseIndex index;
    index.dim = k_dims;
    index.matrix.reserve(docs.size() * k_dims);
    index.ids.reserve(docs.size());
    std::unordered_set<std::string> seen;
    seen.reserve(docs.size());
    for (const auto& doc : docs) {
        if (doc.vector.size() != dim)
            throw InvalidArgument("build_dense_index: dimension mismatch for doc " + doc.id);
        if (!seen.insert(doc.id).second)
            throw InvalidArgument("build_dense_index: duplicate doc id " + doc.id);
        for (size_t j = 0; j < k_dims; ++j) {
            if (!std::isfinite(doc.vector[j]))
                throw InvalidArgument("build_dense_index: non-finite component in doc " + doc.id);
            index.matrix.push_back(doc.vector[j]);
        }
        index.ids.push_back(doc.id);
    }
    index.build_digest = compute_digest(index);
    return index;
}

std::vector<Hit> search_dense(const DenseIndex& index, const DenseQueryVector& query,
                              size_t top_k) {
    if (query.values.size() != index.dim)
        throw InvalidArgument("search_dense: query dim " + std::to_string(query.values.size()) +
                              " != index dim " + std::to_string(index.dim));
    if (top_k == 0) throw InvalidArgument("search_dense: top_k must be >= 1");

    const size_t n = index.size();
    std::vector<float> scores(n);
    const float* q = query.values.data();

    // Scores land in a per-row slot, so the scan parallelizes without
    // changing results.
    const size_t min_rows_per_thread = 4096;
    size_t n_threads = std::min<size_t>(std::thread::hardware_concurrency(),
                                        n / min_rows_per_thread);
    if (n_threads > 1) {
        std::vector<std::thread> workers;
        const size_t chunk = (n + n_threads - 1) / n_threads;
        for (size_t w = 0; w < n_threads; ++w) {
            const size_t lo = w * chunk;
            const size_t hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            workers.emplace_back([&, lo, hi] {
                for (size_t i = lo; i < hi; ++i) scores[i] = dot_f32(q, index.row(i), index.dim);
            });
        }
        for (auto& t : workers) t.join();
    } else {
        for (size_t i = 0; i < n; ++i) scores[i] = dot_f32(q, index.row(i), index.dim);
    }

    detail::TopKSelector selector(top_k, index.ids);
    for (size_t i = 0; i < n; ++i) selector.offer(i, scores[i]);
    return selector.take();
}

void save_dense_index(const DenseIndex& index, const std::string& dir) {
    fs::create_directories(dir);
    write_lrem((fs::path(dir) / "matrix.lrem").string(), index.matrix.data(), index.size(),
               index.dim, Dtype::f32);
    std::ofstream ids((fs::path(dir) / "ids.txt").string());
    if (!ids) throw FormatError("cannot write ids to " + dir);
    for (const auto& id : index.ids) ids << id << '\n';
    std::ofstream manifest((fs::path(dir) / "manifest.txt").string());
    if (!manifest) throw FormatError("cannot write manifest to " + dir);
    manifest << "type=dense\n"
             << "dim=" << index.dim << '\n'
             << "count=" << index.size() << '\n'
             << "digest=" << std::hex << index.build_digest << std::dec << '\n';
}

DenseIndex load_dense_index(const std::string& dir) {
    LremMatrix m = read_lrem((fs::path(dir) / "matrix.lrem").string());
    auto ids = read_id_lines((fs::path(dir) / "ids.txt").string(), m.rows);
    DenseIndex index;
    index.dim = m.dim;
    index.matrix = std::move(m.data);
    index.ids = std::move(ids);
    index.build_digest = compute_digest(index);
    return index;
}

}  // namespace lightretriever
