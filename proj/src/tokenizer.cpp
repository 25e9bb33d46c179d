#include "lightretriever/tokenizer.hpp"

#include <algorithm>

namespace lightretriever {

namespace {

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

// Length of the UTF-8 sequence starting at text[pos]; invalid lead bytes
// advance by one.
size_t utf8_advance(const std::string& text, size_t pos) {
    const unsigned char b = static_cast<unsigned char>(text[pos]);
    size_t len = 1;
    if ((b & 0xe0) == 0xc0) len = 2;
    else if ((b & 0xf0) == 0xe0) len = 3;
    else if ((b & 0xf8) == 0xf0) len = 4;
    return std::min(len, text.size() - pos);
}

}  // namespace

int32_t Tokenizer::Node::child(uint8_t b) const {
    auto it = std::lower_bound(kids.begin(), kids.end(), b,
                               [](const auto& kv, uint8_t key) { return kv.first < key; });
    return (it != kids.end() && it->first == b) ? it->second : -1;
}

Tokenizer::Tokenizer(const Vocabulary& vocab) {
    nodes_.emplace_back();
    for (size_t t = 0; t < vocab.size(); ++t) {
        const std::string& s = vocab.token(static_cast<TokenId>(t));
        int32_t node = 0;
        for (char c : s) {
            const uint8_t b = static_cast<uint8_t>(c);
            int32_t next = nodes_[static_cast<size_t>(node)].child(b);
            if (next < 0) {
                next = static_cast<int32_t>(nodes_.size());
                auto& kids = nodes_[static_cast<size_t>(node)].kids;
                kids.insert(std::lower_bound(kids.begin(), kids.end(), b,
                                             [](const auto& kv, uint8_t key) {
                                                 return kv.first < key;
                                             }),
                            {b, next});
                nodes_.emplace_back();
            }
            node = next;
        }
        nodes_[static_cast<size_t>(node)].token = static_cast<TokenId>(t);
    }
}

TokenizeResult Tokenizer::tokenize(const std::string& text, bool lowercase) const {
    std::string s = text;
    if (lowercase)
        std::transform(s.begin(), s.end(), s.begin(), ascii_lower);

    TokenizeResult result;
    size_t pos = 0;
    while (pos < s.size()) {
        int32_t node = 0;
        TokenId best = -1;
        size_t best_len = 0;
        for (size_t i = pos; i < s.size(); ++i) {
            node = nodes_[static_cast<size_t>(node)].child(static_cast<uint8_t>(s[i]));
            if (node < 0) break;
            if (nodes_[static_cast<size_t>(node)].token >= 0) {
                best = nodes_[static_cast<size_t>(node)].token;
                best_len = i - pos + 1;
            }
        }
        if (best >= 0) {
            result.ids.push_back(best);
            pos += best_len;
        } else {
            pos += utf8_advance(s, pos);
            ++result.skipped_chars;
        }
    }
    return result;
}

TokenizeResult tokenize(const std::string& text, const Vocabulary& vocab, bool lowercase) {
    return Tokenizer(vocab).tokenize(text, lowercase);
}

}  // namespace lightretriever
