// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace smoothing {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A parameter set violates a model constraint (named in the message).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A simulation would exceed its node budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature exhausted its subdivision budget.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A query lies beyond the numerically representable range of a solver.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (law descriptions, config files, grids).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace smoothing
