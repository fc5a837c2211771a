#pragma once

#include <stdexcept>
#include <string>

namespace incomenet {

// Base class for all library errors. The CLI maps subtypes to exit codes:
// format/config/input errors -> 2, statistical degeneracy -> 3.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input values (negative income, bad simplex point, ...).
class InvalidInputError : public Error {
  public:
    using Error::Error;
};

// A file or stream does not match its documented schema.
class FormatError : public Error {
  public:
    using Error::Error;
};

// Invalid run configuration (infeasible generator settings, bad flags).
class ConfigError : public Error {
  public:
    using Error::Error;
};

// Lookup of an unknown entity (user id not present in the graph).
class NotFoundError : public Error {
  public:
    using Error::Error;
};

// A classifier was asked to score a user with no labeled evidence.
class InsufficientEvidenceError : public Error {
  public:
    using Error::Error;
};

// Correlation of a constant sequence, or a rate with an empty class.
class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

// Rate with zero denominator (no positives or no negatives).
class UndefinedRateError : public DegenerateInputError {
  public:
    using DegenerateInputError::DegenerateInputError;
};

// Numerical routine failed to converge.
class NumericError : public Error {
  public:
    using Error::Error;
};

}  // namespace incomenet
