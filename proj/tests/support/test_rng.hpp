#pragma once

#include <cstdint>
#include <vector>

namespace testsupport {

// splitmix64; keeps generated fixtures identical across platforms and
// standard libraries.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double signed_unit() { return uniform(-1.0, 1.0); }
    size_t index(size_t n) { return static_cast<size_t>(next() % n); }
    int range(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1)); }

    std::vector<float> floats(size_t n, double lo = -1.0, double hi = 1.0) {
        std::vector<float> out(n);
        for (auto& v : out) v = static_cast<float>(uniform(lo, hi));
        return out;
    }
    std::vector<double> doubles(size_t n, double lo = -1.0, double hi = 1.0) {
        std::vector<double> out(n);
        for (auto& v : out) v = uniform(lo, hi);
        return out;
    }
    // k distinct values from [0, n)
    std::vector<size_t> sample(size_t n, size_t k) {
        std::vector<size_t> pool(n);
        for (size_t i = 0; i < n; ++i) pool[i] = i;
        for (size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + index(n - i)]);
        pool.resize(k);
        return pool;
    }
};

}  // namespace testsupport
