#include "lightretriever/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lightretriever/error.hpp"
#include "lightretriever/float16.hpp"

namespace lightretriever {

namespace {

constexpr char kLremMagic[4] = {'L', 'R', 'E', 'M'};
constexpr uint32_t kLremVersion = 1;
constexpr size_t kLremHeaderSize = 32;

std::ifstream open_input(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw FormatError("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    return out;
}

// Reads the whole file and splits on '\n'; a final newline does not produce
// an extra element.
std::vector<std::string> read_lines(const std::string& path) {
    auto in = open_input(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string content = buffer.str();
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= content.size()) {
        size_t end = content.find('\n', start);
        if (end == std::string::npos) {
            if (start < content.size()) lines.push_back(content.substr(start));
            break;
        }
        lines.push_back(content.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) fields.push_back(std::move(f));
    return fields;
}

[[noreturn]] void line_error(const std::string& path, size_t lineno, const std::string& what) {
    throw FormatError(path + ":" + std::to_string(lineno) + ": " + what);
}

long long parse_int(const std::string& s, const std::string& path, size_t lineno,
                    const std::string& what) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        line_error(path, lineno, "expected integer " + what + ", got \"" + s + "\"");
    return value;
}

double parse_double(const std::string& s, const std::string& path, size_t lineno,
                    const std::string& what) {
    try {
        size_t pos = 0;
        double value = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return value;
    } catch (const std::exception&) {
        line_error(path, lineno, "expected number " + what + ", got \"" + s + "\"");
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
           static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint64_t get_u64(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace

Vocabulary load_vocab(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.empty()) throw FormatError(path + ": empty vocabulary file");
    std::unordered_map<std::string, size_t> seen;
    seen.reserve(lines.size());
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) line_error(path, i + 1, "empty token");
        auto [it, inserted] = seen.emplace(lines[i], i + 1);
        if (!inserted)
            line_error(path, i + 1,
                       "duplicate token \"" + lines[i] + "\" (first at line " +
                           std::to_string(it->second) + ")");
    }
    return Vocabulary(std::move(lines));
}

LremMatrix read_lrem(const std::string& path) {
    auto in = open_input(path, std::ios::binary);
    unsigned char header[kLremHeaderSize];
    in.read(reinterpret_cast<char*>(header), kLremHeaderSize);
    if (in.gcount() != static_cast<std::streamsize>(kLremHeaderSize))
        throw FormatError(path + ": truncated header");
    if (std::memcmp(header, kLremMagic, 4) != 0)
        throw FormatError(path + ": bad magic, not an LREM file");
    const uint32_t version = get_u32(header + 4);
    if (version != kLremVersion)
        throw FormatError(path + ": unsupported version " + std::to_string(version));
    LremMatrix m;
    m.rows = get_u64(header + 8);
    m.dim = get_u64(header + 16);
    const uint8_t dtype_byte = header[24];
    if (dtype_byte > 1)
        throw FormatError(path + ": unknown dtype byte " + std::to_string(dtype_byte));
    m.dtype = static_cast<Dtype>(dtype_byte);
    for (int i = 25; i < 32; ++i)
        if (header[i] != 0) throw FormatError(path + ": nonzero reserved header bytes");
    if (m.rows == 0 || m.dim == 0) throw FormatError(path + ": zero rows or dim");

    const size_t count = m.rows * m.dim;
    const size_t payload = count * dtype_bytes(m.dtype);
    // validate against the file size before touching the payload
    std::error_code ec;
    const auto file_size = std::filesystem::file_size(path, ec);
    if (!ec) {
        if (file_size < kLremHeaderSize + payload)
            throw FormatError(path + ": truncated payload, expected " + std::to_string(payload) +
                              " bytes");
        if (file_size > kLremHeaderSize + payload)
            throw FormatError(path + ": trailing bytes after payload");
    }
    std::vector<unsigned char> raw(payload);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(payload));
    if (in.gcount() != static_cast<std::streamsize>(payload))
        throw FormatError(path + ": truncated payload, expected " + std::to_string(payload) +
                          " bytes");

    m.data.resize(count);
    if (m.dtype == Dtype::f32) {
        for (size_t i = 0; i < count; ++i) {
            uint32_t bits = get_u32(raw.data() + i * 4);
            float f;
            std::memcpy(&f, &bits, 4);
            m.data[i] = f;
        }
    } else {
        for (size_t i = 0; i < count; ++i) {
            uint16_t bits = static_cast<uint16_t>(raw[i * 2] | (raw[i * 2 + 1] << 8));
            m.data[i] = f16_to_f32(bits);
        }
    }
    for (size_t i = 0; i < count; ++i)
        if (!std::isfinite(m.data[i]))
            throw FormatError(path + ": non-finite value at element " + std::to_string(i));
    return m;
}

void write_lrem(const std::string& path, const float* data, size_t rows, size_t dim, Dtype dtype) {
    if (rows == 0 || dim == 0) throw InvalidArgument("write_lrem: rows and dim must be >= 1");
    std::string out;
    const size_t count = rows * dim;
    out.reserve(kLremHeaderSize + count * dtype_bytes(dtype));
    out.append(kLremMagic, 4);
    put_u32(out, kLremVersion);
    put_u64(out, rows);
    put_u64(out, dim);
    out.push_back(static_cast<char>(dtype));
    out.append(7, '\0');
    if (dtype == Dtype::f32) {
        for (size_t i = 0; i < count; ++i) {
            uint32_t bits;
            std::memcpy(&bits, &data[i], 4);
            put_u32(out, bits);
        }
    } else {
        for (size_t i = 0; i < count; ++i) {
            uint16_t bits = f32_to_f16(data[i]);
            out.push_back(static_cast<char>(bits & 0xff));
            out.push_back(static_cast<char>(bits >> 8));
        }
    }
    auto f = open_output(path, std::ios::binary);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw FormatError("short write to " + path);
}

EmbeddingTable read_embedding_table(const std::string& path) {
    LremMatrix m = read_lrem(path);
    EmbeddingTable t;
    t.vocab_size = m.rows;
    t.dim = m.dim;
    t.dtype = m.dtype;
    t.data = std::move(m.data);
    return t;
}

void write_embedding_table(const EmbeddingTable& table, const std::string& path) {
    write_lrem(path, table.data.data(), table.vocab_size, table.dim, table.dtype);
}

std::vector<std::string> read_id_lines(const std::string& path, size_t expected_count) {
    auto lines = read_lines(path);
    if (lines.size() != expected_count)
        throw FormatError(path + ": expected " + std::to_string(expected_count) + " ids, found " +
                          std::to_string(lines.size()));
    std::unordered_map<std::string, size_t> seen;
    seen.reserve(lines.size());
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) line_error(path, i + 1, "empty id");
        auto [it, inserted] = seen.emplace(lines[i], i + 1);
        if (!inserted)
            line_error(path, i + 1,
                       "duplicate id \"" + lines[i] + "\" (first at line " +
                           std::to_string(it->second) + ")");
    }
    return lines;
}

std::vector<DenseDoc> read_dense_docs(const std::string& table_path, const std::string& ids_path) {
    LremMatrix m = read_lrem(table_path);
    auto ids = read_id_lines(ids_path, m.rows);
    std::vector<DenseDoc> docs(m.rows);
    for (size_t i = 0; i < m.rows; ++i) {
        docs[i].id = std::move(ids[i]);
        docs[i].vector.assign(m.data.begin() + static_cast<ptrdiff_t>(i * m.dim),
                              m.data.begin() + static_cast<ptrdiff_t>((i + 1) * m.dim));
    }
    return docs;
}

void write_dense_docs(const std::vector<DenseDoc>& docs, const std::string& table_path,
                      const std::string& ids_path, Dtype dtype) {
    if (docs.empty()) throw InvalidArgument("write_dense_docs: no documents");
    const size_t dim = docs[0].vector.size();
    std::vector<float> flat;
    flat.reserve(docs.size() * dim);
    for (const auto& d : docs) {
        if (d.vector.size() != dim)
            throw InvalidArgument("write_dense_docs: dimension mismatch for doc " + d.id);
        flat.insert(flat.end(), d.vector.begin(), d.vector.end());
    }
    write_lrem(table_path, flat.data(), docs.size(), dim, dtype);
    auto f = open_output(ids_path);
    for (const auto& d : docs) f << d.id << '\n';
}

std::vector<SparseDoc> read_sparse_docs(const std::string& path, size_t vocab_size) {
    auto lines = read_lines(path);
    std::vector<SparseDoc> docs;
    docs.reserve(lines.size());
    std::unordered_map<std::string, size_t> seen_ids;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(lines[i], nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) line_error(path, i + 1, "not a JSON object");
        if (!obj.contains("id") || !obj["id"].is_string())
            line_error(path, i + 1, "missing string field \"id\"");
        if (!obj.contains("weights") || !obj["weights"].is_object())
            line_error(path, i + 1, "missing object field \"weights\"");

        SparseDoc doc;
        doc.id = obj["id"].get<std::string>();
        if (doc.id.empty()) line_error(path, i + 1, "empty doc id");
        auto [it, inserted] = seen_ids.emplace(doc.id, i + 1);
        if (!inserted)
            line_error(path, i + 1,
                       "duplicate doc id \"" + doc.id + "\" (first at line " +
                           std::to_string(it->second) + ")");

        for (const auto& [key, value] : obj["weights"].items()) {
            long long token = parse_int(key, path, i + 1, "token id");
            if (token < 0) line_error(path, i + 1, "negative token id " + key);
            if (vocab_size > 0 && static_cast<size_t>(token) >= vocab_size)
                line_error(path, i + 1,
                           "token id " + key + " >= vocab size " + std::to_string(vocab_size));
            if (!value.is_number()) line_error(path, i + 1, "impact for token " + key + " is not a number");
            const double impact = value.get<double>();
            if (!std::isfinite(impact)) line_error(path, i + 1, "non-finite impact for token " + key);
            if (impact < 0.0) line_error(path, i + 1, "negative impact for token " + key);
            if (impact == 0.0) continue;  // zeros dropped
            doc.weights.push_back({static_cast<TokenId>(token), static_cast<float>(impact)});
        }
        std::sort(doc.weights.begin(), doc.weights.end(),
                  [](const SparseEntry& a, const SparseEntry& b) { return a.token < b.token; });
        for (size_t j = 1; j < doc.weights.size(); ++j)
            if (doc.weights[j].token == doc.weights[j - 1].token)
                line_error(path, i + 1,
                           "duplicate token id " + std::to_string(doc.weights[j].token));
        docs.push_back(std::move(doc));
    }
    return docs;
}

void write_sparse_docs(const std::vector<SparseDoc>& docs, const std::string& path) {
    auto f = open_output(path);
    for (const auto& doc : docs) {
        nlohmann::ordered_json weights = nlohmann::ordered_json::object();
        for (const auto& e : doc.weights) weights[std::to_string(e.token)] = e.impact;
        nlohmann::ordered_json obj;
        obj["id"] = doc.id;
        obj["weights"] = std::move(weights);
        f << obj.dump() << '\n';
    }
}

Qrels read_qrels(const std::string& path) {
    auto lines = read_lines(path);
    Qrels qrels;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_ws(lines[i]);
        if (fields.size() != 4)
            line_error(path, i + 1, "expected 4 fields \"qid 0 docid rel\", got " +
                                        std::to_string(fields.size()));
        long long rel = parse_int(fields[3], path, i + 1, "relevance");
        if (rel < 0) line_error(path, i + 1, "negative relevance " + fields[3]);
        auto& per_query = qrels.judgments[fields[0]];
        auto [it, inserted] = per_query.emplace(fields[2], static_cast<int>(rel));
        if (!inserted)
            line_error(path, i + 1, "duplicate judgment for (" + fields[0] + ", " + fields[2] + ")");
    }
    return qrels;
}

void write_qrels(const Qrels& qrels, const std::string& path) {
    auto f = open_output(path);
    for (const auto& [qid, docs] : qrels.judgments)
        for (const auto& [did, rel] : docs) f << qid << " 0 " << did << ' ' << rel << '\n';
}

RunFile read_run(const std::string& path) {
    auto lines = read_lines(path);
    RunFile run;
    struct QueryState {
        int last_rank = 0;
        double last_score = 0.0;
        std::string last_doc;
    };
    std::map<std::string, QueryState> state;
    std::map<std::string, std::unordered_map<std::string, size_t>> seen_docs;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_ws(lines[i]);
        if (fields.size() != 6)
            line_error(path, i + 1, "expected 6 fields \"qid Q0 docid rank score tag\", got " +
                                        std::to_string(fields.size()));
        const std::string& qid = fields[0];
        const std::string& did = fields[2];
        long long rank = parse_int(fields[3], path, i + 1, "rank");
        double score = parse_double(fields[4], path, i + 1, "score");
        if (!std::isfinite(score)) line_error(path, i + 1, "non-finite score");

        auto& st = state[qid];
        if (rank != st.last_rank + 1)
            line_error(path, i + 1,
                       "rank gap for query " + qid + ": expected " +
                           std::to_string(st.last_rank + 1) + ", got " + std::to_string(rank));
        if (st.last_rank > 0) {
            if (score > st.last_score)
                line_error(path, i + 1, "score increases with rank for query " + qid);
            if (score == st.last_score && did < st.last_doc)
                line_error(path, i + 1, "tied scores not ordered by doc id for query " + qid);
        }
        auto [it, inserted] = seen_docs[qid].emplace(did, i + 1);
        if (!inserted)
            line_error(path, i + 1, "duplicate doc \"" + did + "\" for query " + qid);

        st.last_rank = static_cast<int>(rank);
        st.last_score = score;
        st.last_doc = did;
        run.queries[qid].push_back(Hit{did, score, static_cast<int>(rank)});
    }
    return run;
}

void write_run(const RunFile& run, const std::string& path, const std::string& tag) {
    auto f = open_output(path);
    for (const auto& [qid, hits] : run.queries)
        for (const auto& h : hits)
            f << qid << " Q0 " << h.doc_id << ' ' << h.rank << ' ' << format_double(h.score) << ' '
              << tag << '\n';
}

}  // namespace lightretriever
