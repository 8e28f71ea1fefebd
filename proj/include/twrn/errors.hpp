#pragma once

#include <stdexcept>
#include <string>

namespace twrn {

/// Invalid configuration or argument (maps to CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: rank deficiency, singular FIM, cross-check mismatch
/// (maps to CLI exit code 2).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File system / serialization failure (maps to CLI exit code 3).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace twrn
