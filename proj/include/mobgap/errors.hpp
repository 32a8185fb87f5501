#pragma once

#include <stdexcept>
#include <string>

namespace mobgap {

// Base class for all library errors. The CLI maps the three branches below
// to distinct exit codes (validation 1, computation 2, I/O 3).
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad inputs: malformed files, schema mismatches, contract violations.
class ValidationError : public Error {
  public:
    using Error::Error;
};

// The inputs were well-formed but the computation cannot proceed.
class ComputationError : public Error {
  public:
    using Error::Error;
};

// Requested model is impossible for the data (e.g. more clusters than
// distinct points).
class InfeasibleError : public ComputationError {
  public:
    using ComputationError::ComputationError;
};

// A prototype update saw a cluster with no members. fit() repairs this
// internally; direct callers of update_prototypes() see the error.
class EmptyClusterError : public ComputationError {
  public:
    using ComputationError::ComputationError;
};

class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace mobgap
