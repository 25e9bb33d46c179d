#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "lightretriever/bench.hpp"
#include "lightretriever/dense_index.hpp"
#include "lightretriever/engine.hpp"
#include "lightretriever/error.hpp"
#include "lightretriever/eval.hpp"
#include "lightretriever/fusion.hpp"
#include "lightretriever/io.hpp"
#include "lightretriever/query_encoder.hpp"
#include "lightretriever/selfcheck.hpp"
#include "lightretriever/sparse_index.hpp"
#include "lightretriever/tokenizer.hpp"
#include "lightretriever/train_numerics.hpp"

namespace py = pybind11;
namespace lr = lightretriever;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using MaskArray = py::array_t<uint8_t, py::array::c_style | py::array::forcecast>;

lr::Dtype parse_dtype(const std::string& name) {
    if (name == "f32") return lr::Dtype::f32;
    if (name == "f16") return lr::Dtype::f16;
    throw lr::InvalidArgument("dtype must be \"f32\" or \"f16\"");
}

std::vector<float> to_vector(const FloatArray& a) {
    return std::vector<float>(a.data(), a.data() + a.size());
}

std::optional<std::vector<double>> optional_doubles(const py::object& obj) {
    if (obj.is_none()) return std::nullopt;
    DoubleArray a = obj.cast<DoubleArray>();
    return std::vector<double>(a.data(), a.data() + a.size());
}

std::optional<std::vector<uint8_t>> optional_mask(const py::object& obj) {
    if (obj.is_none()) return std::nullopt;
    MaskArray a = obj.cast<MaskArray>();
    return std::vector<uint8_t>(a.data(), a.data() + a.size());
}

py::dict timings_dict(const lr::PhaseTimings& t) {
    py::dict d;
    d["tokenize"] = t.tokenize_s * 1e3;
    d["encode"] = t.encode_s * 1e3;
    d["search"] = t.search_s * 1e3;
    return d;
}

std::vector<lr::SparseDoc> docs_from_python(
    const std::vector<std::pair<std::string, std::map<lr::TokenId, float>>>& docs) {
    std::vector<lr::SparseDoc> out;
    out.reserve(docs.size());
    for (const auto& [id, weights] : docs) {
        lr::SparseDoc doc;
        doc.id = id;
        for (const auto& [token, impact] : weights) doc.weights.push_back({token, impact});
        out.push_back(std::move(doc));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "hybrid dense+sparse retrieval engine with lookup-table query encoding";

    py::register_exception<lr::FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<lr::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<lr::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<lr::EmptyQueryError>(m, "EmptyQueryError", PyExc_ValueError);

    py::class_<lr::Hit>(m, "Hit")
        .def_readonly("doc_id", &lr::Hit::doc_id)
        .def_readonly("score", &lr::Hit::score)
        .def_readonly("rank", &lr::Hit::rank)
        .def("__repr__", [](const lr::Hit& h) {
            return "Hit(doc_id='" + h.doc_id + "', score=" + std::to_string(h.score) +
                   ", rank=" + std::to_string(h.rank) + ")";
        });

    py::class_<lr::Vocabulary>(m, "Vocabulary")
        .def(py::init<std::vector<std::string>>(), py::arg("tokens"))
        .def_static("load", &lr::load_vocab, py::arg("path"))
        .def("__len__", &lr::Vocabulary::size)
        .def("id_of", &lr::Vocabulary::id_of, py::arg("token"))
        .def("token", &lr::Vocabulary::token, py::arg("token_id"));

    py::class_<lr::Tokenizer>(m, "Tokenizer")
        .def(py::init<const lr::Vocabulary&>(), py::arg("vocab"), py::keep_alive<1, 2>())
        .def(
            "tokenize",
            [](const lr::Tokenizer& t, const std::string& text, bool lowercase) {
                const auto r = t.tokenize(text, lowercase);
                return py::make_tuple(r.ids, r.skipped_chars);
            },
            py::arg("text"), py::arg("lowercase") = false,
            "returns (token_ids, skipped_chars)");

    py::class_<lr::EmbeddingTable>(m, "EmbeddingTable")
        .def(py::init([](const FloatArray& data, const std::string& dtype) {
                 if (data.ndim() != 2) throw lr::InvalidArgument("expected a 2-d array");
                 lr::EmbeddingTable t;
                 t.vocab_size = static_cast<size_t>(data.shape(0));
                 t.dim = static_cast<size_t>(data.shape(1));
                 t.dtype = parse_dtype(dtype);
                 t.data = to_vector(data);
                 return t;
             }),
             py::arg("data"), py::arg("dtype") = "f32")
        .def_static("load", &lr::read_embedding_table, py::arg("path"))
        .def("save", [](const lr::EmbeddingTable& t, const std::string& path) {
            lr::write_embedding_table(t, path);
        })
        .def_property_readonly("shape",
                               [](const lr::EmbeddingTable& t) {
                                   return py::make_tuple(t.vocab_size, t.dim);
                               })
        .def_property_readonly("dtype", [](const lr::EmbeddingTable& t) {
            return t.dtype == lr::Dtype::f16 ? "f16" : "f32";
        });

    m.def(
        "encode_dense_query",
        [](const std::vector<lr::TokenId>& ids, const lr::EmbeddingTable& table, size_t k_dims,
           bool normalize) {
            const auto q =
                lr::encode_dense_query(ids, table, k_dims == 0 ? table.dim : k_dims, normalize);
            return py::array_t<float>(static_cast<ssize_t>(q.values.size()), q.values.data());
        },
        py::arg("token_ids"), py::arg("table"), py::arg("k_dims") = 0,
        py::arg("normalize") = false, "lookup-then-average dense query encoding");

    m.def(
        "encode_sparse_query",
        [](const std::vector<lr::TokenId>& ids) { return lr::encode_sparse_query(ids).entries; },
        py::arg("token_ids"), "token-count sparse query encoding: [(token_id, count)]");

    m.def(
        "truncate_dims",
        [](const FloatArray& v, size_t k) {
            const auto out = lr::truncate_dims(std::span(v.data(), static_cast<size_t>(v.size())), k);
            return py::array_t<float>(static_cast<ssize_t>(out.size()), out.data());
        },
        py::arg("vector"), py::arg("k"));

    m.def(
        "estimate_serving_size",
        [](size_t vocab_size, size_t dim, const std::string& dtype) {
            return lr::estimate_serving_size(vocab_size, dim, parse_dtype(dtype));
        },
        py::arg("vocab_size"), py::arg("dim"), py::arg("dtype") = "f16",
        "lookup-table footprint in decimal MB, two decimals");

    py::class_<lr::DenseIndex>(m, "DenseIndex")
        .def_static(
            "build",
            [](const FloatArray& matrix, const std::vector<std::string>& ids, size_t k_dims) {
                if (matrix.ndim() != 2) throw lr::InvalidArgument("expected a 2-d array");
                const auto n = static_cast<size_t>(matrix.shape(0));
                const auto dim = static_cast<size_t>(matrix.shape(1));
                if (ids.size() != n) throw lr::InvalidArgument("ids/rows mismatch");
                std::vector<lr::DenseDoc> docs(n);
                for (size_t i = 0; i < n; ++i) {
                    docs[i].id = ids[i];
                    docs[i].vector.assign(matrix.data() + i * dim, matrix.data() + (i + 1) * dim);
                }
                return lr::build_dense_index(docs, k_dims == 0 ? dim : k_dims);
            },
            py::arg("matrix"), py::arg("ids"), py::arg("k_dims") = 0)
        .def_static("load", &lr::load_dense_index, py::arg("dir"))
        .def("save", &lr::save_dense_index, py::arg("dir"))
        .def_property_readonly("dim", [](const lr::DenseIndex& i) { return i.dim; })
        .def("__len__", &lr::DenseIndex::size)
        .def(
            "search",
            [](const lr::DenseIndex& index, const FloatArray& query, size_t top_k) {
                lr::DenseQueryVector q;
                q.values.assign(query.data(), query.data() + query.size());
                py::gil_scoped_release release;
                return lr::search_dense(index, q, top_k);
            },
            py::arg("query"), py::arg("top_k") = 10);

    py::class_<lr::SparseIndex>(m, "SparseIndex")
        .def_static(
            "build",
            [](const std::vector<std::pair<std::string, std::map<lr::TokenId, float>>>& docs,
               size_t vocab_size, size_t k_terms) {
                return lr::build_sparse_index(docs_from_python(docs), vocab_size, k_terms);
            },
            py::arg("docs"), py::arg("vocab_size"), py::arg("k_terms") = 0,
            "docs: [(doc_id, {token_id: impact})]")
        .def_static("load", &lr::load_sparse_index, py::arg("dir"))
        .def("save", &lr::save_sparse_index, py::arg("dir"))
        .def_property_readonly("vocab_size", [](const lr::SparseIndex& i) { return i.vocab_size; })
        .def("__len__", &lr::SparseIndex::doc_count)
        .def(
            "search",
            [](const lr::SparseIndex& index,
               const std::vector<std::pair<lr::TokenId, uint32_t>>& entries, size_t top_k) {
                lr::SparseQueryVector q;
                q.entries = entries;
                std::sort(q.entries.begin(), q.entries.end());
                py::gil_scoped_release release;
                return lr::search_sparse(index, q, top_k);
            },
            py::arg("query"), py::arg("top_k") = 10, "query: [(token_id, count)]");

    m.def(
        "truncate_top_terms",
        [](const std::map<lr::TokenId, float>& weights, size_t k_terms) {
            lr::SparseDoc doc;
            doc.id = "doc";
            for (const auto& [t, i] : weights) doc.weights.push_back({t, i});
            std::map<lr::TokenId, float> out;
            for (const auto& e : lr::truncate_top_terms(doc, k_terms).weights)
                out[e.token] = e.impact;
            return out;
        },
        py::arg("weights"), py::arg("k_terms"));

    m.def(
        "normalize_scores",
        [](const std::vector<lr::Hit>& hits) { return lr::normalize_scores(hits); },
        py::arg("hits"));

    m.def(
        "fuse",
        [](const std::vector<lr::Hit>& dense, const std::vector<lr::Hit>& sparse, double alpha,
           size_t pool_size, size_t top_k) {
            return lr::fuse(dense, sparse, lr::FusionConfig{alpha, pool_size}, top_k);
        },
        py::arg("dense_hits"), py::arg("sparse_hits"), py::arg("alpha") = 0.5,
        py::arg("pool_size") = 1000, py::arg("top_k") = 10);

    m.def("ndcg_at_k", &lr::ndcg_at_k, py::arg("ranked_ids"), py::arg("qrels_for_query"),
          py::arg("k"));
    m.def("recall_at_k", &lr::recall_at_k, py::arg("ranked_ids"), py::arg("qrels_for_query"),
          py::arg("k"));
    m.def(
        "evaluate_run",
        [](const std::string& run_path, const std::string& qrels_path,
           const std::vector<size_t>& ks) {
            const auto report =
                lr::evaluate_run(lr::read_run(run_path), lr::read_qrels(qrels_path), ks);
            py::dict out;
            out["means"] = report.means;
            out["per_query"] = report.per_query;
            out["query_count"] = report.query_count;
            out["queries_without_relevant"] = report.queries_without_relevant;
            return out;
        },
        py::arg("run_path"), py::arg("qrels_path"),
        py::arg("ks") = std::vector<size_t>{10, 20, 50, 100});

    // training-side numerics
    m.def(
        "contrastive_loss",
        [](const std::vector<double>& pos, const std::vector<std::vector<double>>& negs,
           double tau) {
            if (pos.size() != negs.size())
                throw lr::InvalidArgument("pos and negs must have the same length");
            lr::ScoreBatch batch;
            batch.tau = tau;
            for (size_t i = 0; i < pos.size(); ++i)
                batch.queries.push_back({pos[i], negs[i]});
            return lr::contrastive_loss(batch);
        },
        py::arg("pos"), py::arg("negs"), py::arg("tau") = 0.02);

    m.def("log_saturate", &lr::log_saturate, py::arg("x"));

    m.def(
        "flops_regularizer",
        [](const FloatArray& pooled) {
            if (pooled.ndim() != 2) throw lr::InvalidArgument("expected a 2-d array");
            return lr::flops_regularizer(
                std::span(pooled.data(), static_cast<size_t>(pooled.size())),
                static_cast<size_t>(pooled.shape(0)), static_cast<size_t>(pooled.shape(1)));
        },
        py::arg("pooled_logits"));

    m.def("kl_alignment_loss", &lr::kl_alignment_loss, py::arg("student_scores"),
          py::arg("teacher_scores"), py::arg("tau") = 1.0);

    m.def(
        "custom_causal_mask",
        [](size_t seq_len, size_t prompt_len, size_t block_width) {
            const auto mask = lr::custom_causal_mask(seq_len, prompt_len, block_width);
            py::array_t<uint8_t> out({seq_len, seq_len});
            std::copy(mask.entries.begin(), mask.entries.end(), out.mutable_data());
            return out;
        },
        py::arg("seq_len"), py::arg("prompt_len"), py::arg("block_width"),
        "L x L uint8 matrix, 1 = attend");

    m.def(
        "sparse_doc_pool_naive",
        [](const FloatArray& hidden, const FloatArray& projection, const py::object& mask,
           const py::object& bias) {
            if (hidden.ndim() != 2 || projection.ndim() != 2)
                throw lr::InvalidArgument("expected 2-d arrays");
            const auto m = optional_mask(mask);
            std::optional<std::vector<float>> b;
            if (!bias.is_none()) b = to_vector(bias.cast<FloatArray>());
            const auto out = lr::sparse_doc_pool_naive(
                std::span(hidden.data(), static_cast<size_t>(hidden.size())),
                static_cast<size_t>(hidden.shape(0)), static_cast<size_t>(hidden.shape(1)),
                std::span(projection.data(), static_cast<size_t>(projection.size())),
                static_cast<size_t>(projection.shape(1)),
                m ? std::span<const uint8_t>(*m) : std::span<const uint8_t>{},
                b ? std::span<const float>(*b) : std::span<const float>{});
            return py::array_t<float>(static_cast<ssize_t>(out.size()), out.data());
        },
        py::arg("hidden_states"), py::arg("projection"), py::arg("mask") = py::none(),
        py::arg("bias") = py::none());

    m.def(
        "fused_project_max_forward",
        [](const DoubleArray& x, const DoubleArray& w, const py::object& bias,
           const py::object& mask) {
            if (x.ndim() != 3 || w.ndim() != 2) throw lr::InvalidArgument("expected 3-d X, 2-d W");
            const size_t B = x.shape(0), T = x.shape(1), H = x.shape(2), V = w.shape(1);
            const auto b = optional_doubles(bias);
            const auto m = optional_mask(mask);
            const auto out = lr::fused_project_max_forward<double>(
                std::span(x.data(), static_cast<size_t>(x.size())), B, T, H,
                std::span(w.data(), static_cast<size_t>(w.size())), V,
                b ? std::span<const double>(*b) : std::span<const double>{},
                m ? std::span<const uint8_t>(*m) : std::span<const uint8_t>{});
            py::array_t<double> values({B, V});
            std::copy(out.values.begin(), out.values.end(), values.mutable_data());
            py::array_t<int32_t> argmax({B, V});
            std::copy(out.argmax.begin(), out.argmax.end(), argmax.mutable_data());
            return py::make_tuple(values, argmax);
        },
        py::arg("x"), py::arg("w"), py::arg("bias") = py::none(), py::arg("mask") = py::none(),
        "returns (values B x V, argmax B x V); never materializes B x T x V");

    m.def(
        "fused_project_max_backward",
        [](const DoubleArray& grad_y, const py::array_t<int32_t>& argmax, const DoubleArray& x,
           const DoubleArray& w, const py::object& mask) {
            if (x.ndim() != 3 || w.ndim() != 2) throw lr::InvalidArgument("expected 3-d X, 2-d W");
            const size_t B = x.shape(0), T = x.shape(1), H = x.shape(2), V = w.shape(1);
            const auto m = optional_mask(mask);
            std::vector<int32_t> am(argmax.data(), argmax.data() + argmax.size());
            const auto grads = lr::fused_project_max_backward<double>(
                std::span(grad_y.data(), static_cast<size_t>(grad_y.size())), am,
                std::span(x.data(), static_cast<size_t>(x.size())), B, T, H,
                std::span(w.data(), static_cast<size_t>(w.size())), V,
                m ? std::span<const uint8_t>(*m) : std::span<const uint8_t>{});
            py::array_t<double> gx({B, T, H});
            std::copy(grads.grad_input.begin(), grads.grad_input.end(), gx.mutable_data());
            py::array_t<double> gw({H, V});
            std::copy(grads.grad_weight.begin(), grads.grad_weight.end(), gw.mutable_data());
            py::array_t<double> gb(static_cast<ssize_t>(V));
            std::copy(grads.grad_bias.begin(), grads.grad_bias.end(), gb.mutable_data());
            return py::make_tuple(gx, gw, gb);
        },
        py::arg("grad_output"), py::arg("argmax"), py::arg("x"), py::arg("w"),
        py::arg("mask") = py::none(), "returns (grad_x, grad_w, grad_b)");

    m.def("run_selfcheck", []() {
        py::list out;
        for (const auto& r : lr::run_selfcheck())
            out.append(py::make_tuple(r.name, r.passed, r.detail));
        return out;
    });

    // engine + config
    py::enum_<lr::SearchMode>(m, "SearchMode")
        .value("dense", lr::SearchMode::dense)
        .value("sparse", lr::SearchMode::sparse)
        .value("hybrid", lr::SearchMode::hybrid);

    py::class_<lr::Engine>(m, "Engine")
        .def(py::init([](const std::string& config_path) {
                 return std::make_unique<lr::Engine>(lr::EngineConfig::from_file(config_path));
             }),
             py::arg("config_path"))
        .def(
            "search",
            [](const lr::Engine& engine, const std::string& query, const std::string& mode,
               size_t top_k, const py::object& alpha) {
                std::optional<double> a;
                if (!alpha.is_none()) a = alpha.cast<double>();
                lr::SearchResult result;
                {
                    py::gil_scoped_release release;
                    result = engine.search(query, lr::parse_mode(mode), top_k, a);
                }
                py::dict out;
                out["hits"] = result.hits;
                out["timings_ms"] = timings_dict(result.timings);
                out["skipped_chars"] = result.skipped_chars;
                return out;
            },
            py::arg("query"), py::arg("mode") = "hybrid", py::arg("top_k") = 10,
            py::arg("alpha") = py::none());
}
