#pragma once

#include <stdexcept>
#include <string>

namespace lightretriever {

// Malformed input bytes: bad magic, truncated payload, unparseable lines.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller violated a precondition (bad dimension, empty query, id out of range).
struct InvalidArgument : std::runtime_error {
    explicit InvalidArgument(const std::string& msg) : std::runtime_error(msg) {}
};

// Engine configuration problems: missing files, inconsistent settings.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lightretriever
