#pragma once

#include <stdexcept>
#include <string>

namespace bovigeom {

/// Bad configuration, bad arguments, violated preconditions. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or unusable input data (files, streams, records). CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace bovigeom
