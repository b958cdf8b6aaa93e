#pragma once

#include <stdexcept>
#include <string>

namespace ebql {

struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidPartition : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedDimension : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidAction : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised by the config loader; carries the offending line when known.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_number(line) {}
    int line_number;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ebql
