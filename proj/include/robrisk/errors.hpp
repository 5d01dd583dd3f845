#pragma once

#include <stdexcept>
#include <string>

namespace robrisk {

// Base of every error raised by the library. The C API maps each subclass
// onto one status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector lengths disagree (variable vs. space, weights vs. values, rows).
class DimensionError : public Error {
public:
    using Error::Error;
};

// Argument outside its mathematical domain (alpha not in (0,1), tol <= 0,
// non-finite input, probabilities that do not sum to one, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// The requested operation is not available for this risk measure kind.
class CapabilityError : public Error {
public:
    using Error::Error;
};

// A solver post-condition failed. Signals a broken score or measure
// implementation, never bad user input.
class ContractError : public Error {
public:
    using Error::Error;
};

// Regression design is (numerically) rank deficient.
class SingularDesignError : public Error {
public:
    using Error::Error;
};

// Score does not satisfy the hypotheses required by the requested fit mode.
class UnsupportedScoreError : public Error {
public:
    using Error::Error;
};

// Malformed risk/score specification string or CSV content.
class ParseError : public Error {
public:
    using Error::Error;
};

// File could not be opened or read.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace robrisk
