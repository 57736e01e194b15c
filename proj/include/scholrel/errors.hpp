#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scholrel {

/// Raised when a JSONL input stream contains a record that cannot be
/// accepted (malformed JSON, missing field, duplicate id, ...).
/// Carries the 1-based line number of the offending record.
class IngestError : public std::runtime_error {
public:
    IngestError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Raised when a configuration file is loadable but semantically invalid
/// (e.g. an implied probability outside [0,1]).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace scholrel
