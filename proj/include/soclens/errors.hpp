#pragma once

#include <stdexcept>
#include <string>

namespace soclens {

/// Malformed input data (VCD text, event-log CSV, fixture files).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string what, size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                  : std::move(what)),
          line_(line) {}
    size_t line() const { return line_; }

private:
    size_t line_;
};

/// Invalid parameter or configuration value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure (missing input, unwritable output directory).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace soclens
