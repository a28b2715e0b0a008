#pragma once

#include <stdexcept>
#include <string>

namespace hpmean {

/// Bad input: a violated precondition or a malformed configuration value.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (non-convergence, empty quadrature, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised where a horizontal operator needs a non-vanishing horizontal gradient.
class VanishingGradient : public NumericalError {
public:
    using NumericalError::NumericalError;
};

inline void require(bool cond, const char* what) {
    if (!cond) throw InvalidArgument(what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) throw InvalidArgument(what);
}

}  // namespace hpmean
