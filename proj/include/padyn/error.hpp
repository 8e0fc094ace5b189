#pragma once

#include <stdexcept>
#include <string>

namespace padyn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input, ring mismatch, violated preconditions.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A value or verdict cannot be decided at the tracked precision.
class PrecisionError : public Error {
public:
    using Error::Error;
};

/// A mathematical check failed in a way that is an error of the operation
/// (non-unit inversion, non-Eisenstein polynomial, non-integral group law, ...).
class MathError : public Error {
public:
    using Error::Error;
};

}  // namespace padyn
