#include "lightretriever/types.hpp"

#include "lightretriever/error.hpp"
#include "hash_util.hpp"

namespace lightretriever {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.empty()) throw InvalidArgument("vocabulary must hold at least one token");
    index_.reserve(tokens_.size());
    for (size_t i = 0; i < tokens_.size(); ++i) {
        auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
        if (!inserted)
            throw InvalidArgument("duplicate vocabulary token: \"" + tokens_[i] + "\"");
    }
}

TokenId Vocabulary::id_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? -1 : it->second;
}

uint64_t instruction_digest(const std::string& instruction) {
    detail::Fnv1a h;
    h.update(instruction);
    return h.digest();
}

}  // namespace lightretriever
