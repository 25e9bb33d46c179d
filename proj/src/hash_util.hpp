#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace lightretriever::detail {

// 64-bit FNV-1a, used for build digests and instruction digests.
struct Fnv1a {
    uint64_t state = 1469598103934665603ull;

    void update(const void* data, size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < len; ++i) {
            state ^= p[i];
            state *= 1099511628211ull;
        }
    }
    void update(const std::string& s) { update(s.data(), s.size()); }
    template <typename T>
    void update_value(const T& v) {
        static_assert(std::is_trivially_copyable_v<T>);
        update(&v, sizeof(v));
    }
    uint64_t digest() const { return state; }
};

}  // namespace lightretriever::detail
