#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lightretriever/types.hpp"

#include "test_rng.hpp"

namespace testsupport {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("lightretriever_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// "t0", "t1", ... — no token is a substring boundary problem for the greedy
// matcher as long as queries separate them with spaces
inline std::vector<std::string> numbered_tokens(size_t n) {
    std::vector<std::string> tokens(n);
    for (size_t i = 0; i < n; ++i) tokens[i] = "t" + std::to_string(i);
    return tokens;
}

inline lightretriever::EmbeddingTable random_table(size_t vocab, size_t dim, Rng& rng) {
    lightretriever::EmbeddingTable t;
    t.vocab_size = vocab;
    t.dim = dim;
    t.data = rng.floats(vocab * dim);
    return t;
}

}  // namespace testsupport
