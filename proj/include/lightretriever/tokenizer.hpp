#pragma once

#include <string>
#include <vector>

#include "lightretriever/types.hpp"

namespace lightretriever {

struct TokenizeResult {
    std::vector<TokenId> ids;
    size_t skipped_chars = 0;  // code points that matched no vocabulary entry
};

// Greedy longest-match tokenizer over the raw byte stream. At each position
// the longest vocabulary entry starting there is consumed; if none matches,
// one UTF-8 code point is skipped and counted. Pure function of
// (text, vocab, lowercase); lowercasing is ASCII-only.
class Tokenizer {
public:
    explicit Tokenizer(const Vocabulary& vocab);

    TokenizeResult tokenize(const std::string& text, bool lowercase = false) const;

private:
    struct Node {
        TokenId token = -1;
        std::vector<std::pair<uint8_t, int32_t>> kids;  // sorted by byte
        int32_t child(uint8_t b) const;
    };
    std::vector<Node> nodes_;
};

// Convenience wrapper that builds the trie on the fly; prefer holding a
// Tokenizer when encoding many queries.
TokenizeResult tokenize(const std::string& text, const Vocabulary& vocab, bool lowercase = false);

}  // namespace lightretriever
