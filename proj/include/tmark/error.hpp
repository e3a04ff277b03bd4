#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tmark {

/// Malformed bracketed input. `offset()` is the byte offset into the parsed text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Invalid user-supplied configuration or data (bad feature string, empty training set, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant was violated.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace tmark
