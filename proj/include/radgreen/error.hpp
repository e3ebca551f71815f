#pragma once

#include <stdexcept>
#include <string>

namespace radgreen {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or violated preconditions (bad grid size, q <= 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or input files.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure broke down: lost positivity, no convergence, plateau.
class NumericalError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw DomainError(message);
}

}  // namespace radgreen
