#pragma once

#include <stdexcept>
#include <string>

namespace qmem {

/// Thrown when caller-supplied values violate a documented precondition
/// (bad angles, negative rates, unphysical density matrices, ...).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an algorithm fails to reach its numerical contract
/// (non-convergent fit, unstable inversion, overflow).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown for malformed config files and unknown keys.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qmem
