// Copyright 2026 The ctcsim Authors.
// Licensed under the Apache License, Version 2.0. You may obtain a copy of
// the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <stdexcept>
#include <string>

namespace ctc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not agree (subsystem dims, matrix sizes).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's documented precondition on a numeric value
// (e.g. a non-Hermitian argument to a PSD test).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A matrix or vector is not a valid quantum state.
class InvalidState : public Error {
 public:
  using Error::Error;
};

// A state handed to an operation does not satisfy the consistency
// requirement the operation depends on.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown in a solver whose result is guaranteed to exist.
class SolverError : public Error {
 public:
  using Error::Error;
};

// An interaction circuit or scenario is wired inconsistently.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctc
