#pragma once

#include <stdexcept>
#include <string>

namespace cartonsynth {

// Bad configuration or CLI usage. Mapped to exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data. Mapped to exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : DataError {
    std::size_t byte_offset;
    ParseError(const std::string& msg, std::size_t offset)
        : DataError(msg + " (byte offset " + std::to_string(offset) + ")"), byte_offset(offset) {}
};

struct ReconstructionError : DataError {
    explicit ReconstructionError(const std::string& msg) : DataError(msg) {}
};

}  // namespace cartonsynth
