#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>

#include "lightretriever/error.hpp"
#include "lightretriever/float16.hpp"
#include "lightretriever/io.hpp"

#include "support/fixtures.hpp"
#include "support/test_rng.hpp"

using namespace lightretriever;
using testsupport::Rng;
using testsupport::TempDir;

TEST_CASE("load_vocab assigns line-index ids") {
    TempDir dir("vocab");
    const auto path = dir.file("vocab.txt");
    testsupport::write_text(path, "a\nb\nc");
    const Vocabulary v = load_vocab(path);
    CHECK(v.size() == 3);
    CHECK(v.id_of("b") == 1);
    CHECK(v.token(2) == "c");

    // trailing newline is not a token
    testsupport::write_text(path, "a\nb\nc\n");
    CHECK(load_vocab(path).size() == 3);
}

TEST_CASE("load_vocab rejects duplicates, empties, and empty files") {
    TempDir dir("vocab_bad");
    const auto path = dir.file("vocab.txt");
    testsupport::write_text(path, "a\na");
    CHECK_THROWS_WITH_AS(load_vocab(path), doctest::Contains("line 1"), FormatError);
    testsupport::write_text(path, "");
    CHECK_THROWS_AS(load_vocab(path), FormatError);
    testsupport::write_text(path, "a\n\nb");
    CHECK_THROWS_AS(load_vocab(path), FormatError);
}

TEST_CASE("32k-line synthetic vocab round-trips with V intact") {
    TempDir dir("vocab_big");
    const auto path = dir.file("vocab.txt");
    auto tokens = testsupport::numbered_tokens(32000);
    std::string content;
    for (const auto& t : tokens) content += t + "\n";
    testsupport::write_text(path, content);
    const Vocabulary v = load_vocab(path);
    CHECK(v.size() == 32000);  // oracle: the generator wrote exactly 32000 lines
    CHECK(v.id_of("t31999") == 31999);
}

TEST_CASE("LREM f32 round-trip is bit exact") {
    TempDir dir("lrem");
    const auto path = dir.file("m.lrem");
    Rng rng(1);
    const auto data = rng.floats(2 * 3);
    write_lrem(path, data.data(), 2, 3, Dtype::f32);
    const LremMatrix m = read_lrem(path);
    CHECK(m.rows == 2);
    CHECK(m.dim == 3);
    CHECK(m.dtype == Dtype::f32);
    for (size_t i = 0; i < data.size(); ++i) {
        uint32_t a, b;
        std::memcpy(&a, &data[i], 4);
        std::memcpy(&b, &m.data[i], 4);
        CHECK(a == b);
    }
}

TEST_CASE("LREM f16 payload widens to the exact stored halves") {
    TempDir dir("lrem16");
    const auto path = dir.file("m.lrem");
    Rng rng(2);
    const auto data = rng.floats(4 * 5);
    write_lrem(path, data.data(), 4, 5, Dtype::f16);
    const LremMatrix m = read_lrem(path);
    CHECK(m.dtype == Dtype::f16);
    for (size_t i = 0; i < data.size(); ++i)
        CHECK(m.data[i] == f16_to_f32(f32_to_f16(data[i])));

    // widening what we already widened loses nothing
    write_lrem(dir.file("m2.lrem"), m.data.data(), 4, 5, Dtype::f16);
    const LremMatrix m2 = read_lrem(dir.file("m2.lrem"));
    CHECK(m2.data == m.data);
}

TEST_CASE("LREM format errors are distinct and named") {
    TempDir dir("lrem_bad");
    const auto path = dir.file("m.lrem");

    testsupport::write_text(path, "XXXXgarbage-that-is-long-enough-to-hold-a-header????");
    CHECK_THROWS_WITH_AS(read_lrem(path), doctest::Contains("bad magic"), FormatError);

    float one = 1.0f;
    write_lrem(path, &one, 1, 1, Dtype::f32);
    auto bytes = testsupport::read_text(path);
    SUBCASE("version mismatch") {
        bytes[4] = 9;
        testsupport::write_text(path, bytes);
        CHECK_THROWS_WITH_AS(read_lrem(path), doctest::Contains("version"), FormatError);
    }
    SUBCASE("truncated payload") {
        testsupport::write_text(path, bytes.substr(0, bytes.size() - 2));
        CHECK_THROWS_WITH_AS(read_lrem(path), doctest::Contains("truncated"), FormatError);
    }
    SUBCASE("trailing bytes") {
        testsupport::write_text(path, bytes + "x");
        CHECK_THROWS_WITH_AS(read_lrem(path), doctest::Contains("trailing"), FormatError);
    }
}

TEST_CASE("Llama-8b-shaped f16 header declares the Table-5 payload size") {
    // V=128256, H=4096, f16: 128256 * 4096 * 2 bytes, without allocating it
    const uint64_t rows = 128256, dim = 4096;
    CHECK(rows * dim * 2 == 1050673152ull);

    // write just the header, then confirm the reader asks for that payload
    TempDir dir("lrem_huge");
    const auto path = dir.file("huge.lrem");
    std::string header = "LREM";
    auto put32 = [&](uint32_t v) {
        for (int i = 0; i < 4; ++i) header.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    auto put64 = [&](uint64_t v) {
        for (int i = 0; i < 8; ++i) header.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    put32(1);
    put64(rows);
    put64(dim);
    header.push_back(1);  // f16
    header.append(7, '\0');
    testsupport::write_text(path, header);
    CHECK_THROWS_WITH_AS(read_lrem(path), doctest::Contains("1050673152"), FormatError);
}

TEST_CASE("sparse docs JSONL parses, validates, and round-trips") {
    TempDir dir("sparse");
    const auto path = dir.file("docs.jsonl");

    testsupport::write_text(path, R"({"id":"d1","weights":{"3":1.5}})" "\n");
    auto docs = read_sparse_docs(path);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].id == "d1");
    REQUIRE(docs[0].weights.size() == 1);
    CHECK(docs[0].weights[0].token == 3);
    CHECK(docs[0].weights[0].impact == 1.5f);

    SUBCASE("zero impacts are dropped, keys arrive unsorted") {
        testsupport::write_text(path, R"({"id":"d1","weights":{"9":2.0,"3":1.5,"5":0.0}})" "\n");
        docs = read_sparse_docs(path);
        REQUIRE(docs[0].weights.size() == 2);
        CHECK(docs[0].weights[0].token == 3);
        CHECK(docs[0].weights[1].token == 9);
    }
    SUBCASE("negative impact rejected with line number") {
        testsupport::write_text(path,
                                R"({"id":"d1","weights":{"3":1.0}})" "\n"
                                R"({"id":"d2","weights":{"4":-0.5}})" "\n");
        CHECK_THROWS_WITH_AS(read_sparse_docs(path), doctest::Contains(":2"), FormatError);
    }
    SUBCASE("duplicate token ids rejected") {
        // "03" and "3" collide after numeric parsing
        testsupport::write_text(path, R"({"id":"d1","weights":{"3":1.0,"03":2.0}})" "\n");
        CHECK_THROWS_WITH_AS(read_sparse_docs(path), doctest::Contains("duplicate token"),
                             FormatError);
    }
    SUBCASE("token id beyond the vocabulary rejected when V is known") {
        testsupport::write_text(path, R"({"id":"d1","weights":{"10":1.0}})" "\n");
        CHECK_THROWS_AS(read_sparse_docs(path, 10), FormatError);
        CHECK(read_sparse_docs(path, 11).size() == 1);
    }
}

TEST_CASE("generated sparse corpus round-trips with field equality") {
    TempDir dir("sparse_rt");
    const auto path = dir.file("docs.jsonl");
    Rng rng(7);
    std::vector<SparseDoc> docs(100);
    for (size_t i = 0; i < docs.size(); ++i) {
        docs[i].id = "doc" + std::to_string(i);
        for (size_t t : rng.sample(500, 1 + rng.index(20)))
            docs[i].weights.push_back(
                {static_cast<TokenId>(t), static_cast<float>(rng.uniform(0.01, 4.0))});
        std::sort(docs[i].weights.begin(), docs[i].weights.end(),
                  [](const auto& a, const auto& b) { return a.token < b.token; });
    }
    write_sparse_docs(docs, path);
    // oracle: the generator's in-memory copy
    CHECK(read_sparse_docs(path, 500) == docs);
}

TEST_CASE("dense docs round-trip through LREM + ids sidecar") {
    TempDir dir("dense_rt");
    Rng rng(8);
    std::vector<DenseDoc> docs(10);
    for (size_t i = 0; i < docs.size(); ++i) {
        docs[i].id = "d" + std::to_string(i);
        docs[i].vector = rng.floats(16);
    }
    write_dense_docs(docs, dir.file("m.lrem"), dir.file("ids.txt"));
    CHECK(read_dense_docs(dir.file("m.lrem"), dir.file("ids.txt")) == docs);

    SUBCASE("id count mismatch rejected") {
        testsupport::write_text(dir.file("ids.txt"), "only-one\n");
        CHECK_THROWS_AS(read_dense_docs(dir.file("m.lrem"), dir.file("ids.txt")), FormatError);
    }
}

TEST_CASE("qrels follow the TREC convention") {
    TempDir dir("qrels");
    const auto path = dir.file("qrels.txt");
    testsupport::write_text(path, "q1 0 d1 2\nq1 0 d2 0\nq2 0 d1 1\n");
    const Qrels q = read_qrels(path);
    CHECK(q.relevance("q1", "d1") == 2);
    CHECK(q.relevance("q1", "d2") == 0);
    CHECK(q.relevance("q2", "d1") == 1);
    CHECK(q.relevance("q9", "d1") == 0);

    SUBCASE("negative relevance rejected") {
        testsupport::write_text(path, "q1 0 d1 -1\n");
        CHECK_THROWS_AS(read_qrels(path), FormatError);
    }
    SUBCASE("write-read identity") {
        write_qrels(q, dir.file("copy.txt"));
        const Qrels q2 = read_qrels(dir.file("copy.txt"));
        CHECK(q2.judgments == q.judgments);
    }
}

TEST_CASE("run files validate rank and score structure") {
    TempDir dir("run");
    const auto path = dir.file("run.txt");
    testsupport::write_text(path,
                            "q1 Q0 d1 1 3.5 tag\n"
                            "q1 Q0 d2 2 2.0 tag\n"
                            "q2 Q0 d9 1 1.0 tag\n");
    const RunFile run = read_run(path);
    CHECK(run.queries.size() == 2);
    CHECK(run.queries.at("q1")[1].doc_id == "d2");
    CHECK(run.queries.at("q1")[1].rank == 2);

    SUBCASE("rank gap rejected") {
        testsupport::write_text(path, "q1 Q0 d1 1 3.5 tag\nq1 Q0 d2 3 2.0 tag\n");
        CHECK_THROWS_WITH_AS(read_run(path), doctest::Contains("rank gap"), FormatError);
    }
    SUBCASE("increasing score rejected") {
        testsupport::write_text(path, "q1 Q0 d1 1 1.0 tag\nq1 Q0 d2 2 2.0 tag\n");
        CHECK_THROWS_AS(read_run(path), FormatError);
    }
    SUBCASE("tied scores must be id-ordered") {
        testsupport::write_text(path, "q1 Q0 d2 1 1.0 tag\nq1 Q0 d1 2 1.0 tag\n");
        CHECK_THROWS_AS(read_run(path), FormatError);
    }
    SUBCASE("write-read identity on fields") {
        write_run(run, dir.file("copy.txt"), "tag");
        const RunFile run2 = read_run(dir.file("copy.txt"));
        CHECK(run2.queries == run.queries);
    }
}

TEST_CASE("embedding table IO keeps shape and dtype") {
    TempDir dir("table");
    Rng rng(9);
    EmbeddingTable t = testsupport::random_table(20, 4, rng);
    t.dtype = Dtype::f16;
    write_embedding_table(t, dir.file("t.lrem"));
    const EmbeddingTable r = read_embedding_table(dir.file("t.lrem"));
    CHECK(r.vocab_size == 20);
    CHECK(r.dim == 4);
    CHECK(r.dtype == Dtype::f16);
    for (size_t i = 0; i < t.data.size(); ++i)
        CHECK(r.data[i] == f16_to_f32(f32_to_f16(t.data[i])));
}
