#include <doctest.h>

#include <thread>

#include "lightretriever/tokenizer.hpp"

#include "support/oracles.hpp"
#include "support/test_rng.hpp"

using namespace lightretriever;
using testsupport::Rng;

TEST_CASE("longest match wins") {
    const Vocabulary vocab({"a", "b", "ab"});
    const auto result = tokenize("ab", vocab);
    REQUIRE(result.ids.size() == 1);
    CHECK(result.ids[0] == vocab.id_of("ab"));
    CHECK(result.skipped_chars == 0);
}

TEST_CASE("empty input yields nothing") {
    const Vocabulary vocab({"a"});
    const auto result = tokenize("", vocab);
    CHECK(result.ids.empty());
    CHECK(result.skipped_chars == 0);
}

TEST_CASE("unknown characters are skipped and counted") {
    const Vocabulary vocab({"ab", "c"});
    const auto result = tokenize("xabycz", vocab);
    CHECK(result.ids == std::vector<TokenId>{0, 1});
    CHECK(result.skipped_chars == 3);

    // one count per UTF-8 code point, not per byte
    const auto utf8 = tokenize("é", vocab);
    CHECK(utf8.ids.empty());
    CHECK(utf8.skipped_chars == 1);
}

TEST_CASE("lowercasing is optional and ASCII-only") {
    const Vocabulary vocab({"abc"});
    CHECK(tokenize("ABC", vocab, false).ids.empty());
    CHECK(tokenize("ABC", vocab, true).ids == std::vector<TokenId>{0});
}

TEST_CASE("matches the naive greedy oracle on 1000 random strings") {
    Rng rng(42);
    // 100 tokens over a small alphabet so overlaps and prefixes are common
    std::vector<std::string> tokens;
    while (tokens.size() < 100) {
        std::string t;
        const size_t len = 1 + rng.index(4);
        for (size_t i = 0; i < len; ++i) t.push_back(static_cast<char>('a' + rng.index(4)));
        if (std::find(tokens.begin(), tokens.end(), t) == tokens.end()) tokens.push_back(t);
    }
    const Vocabulary vocab(tokens);
    const Tokenizer tok(vocab);

    for (int it = 0; it < 1000; ++it) {
        std::string text;
        const size_t len = rng.index(40);
        for (size_t i = 0; i < len; ++i)
            text.push_back(static_cast<char>('a' + rng.index(6)));  // includes unknown e, f
        CHECK(tok.tokenize(text).ids == testsupport::oracle::greedy_tokenize(text, tokens));
    }
}

TEST_CASE("pure function: identical output across repeated and threaded calls") {
    const Vocabulary vocab({"ab", "a", "b", "ba"});
    const Tokenizer tok(vocab);
    const std::string text = "abbaabab";
    const auto expected = tok.tokenize(text).ids;

    std::vector<std::vector<TokenId>> results(8);
    std::vector<std::thread> threads;
    for (size_t i = 0; i < results.size(); ++i)
        threads.emplace_back([&, i] { results[i] = tok.tokenize(text).ids; });
    for (auto& t : threads) t.join();
    for (const auto& r : results) CHECK(r == expected);
}
