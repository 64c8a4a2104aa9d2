#pragma once

#include <stdexcept>
#include <string>

namespace tsel {

// Bad input data: malformed files, invariant violations in loaded content.
// CLI maps this to exit code 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed line in a TREC-format file; carries file/line location.
struct ParseError : DataError {
    ParseError(const std::string& file, std::size_t line, const std::string& msg)
        : DataError(file + ":" + std::to_string(line) + ": " + msg),
          file_path(file),
          line_number(line) {}
    std::string file_path;
    std::size_t line_number;
};

// Unusable configuration: unresolvable paths, contradictory flags.
// CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace tsel
