#pragma once

#include <stdexcept>
#include <string>

namespace mussel {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs outside the model's validity region (nonpositive parameters,
// alpha*r too close to 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// (H1)/(H2) gate failures.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

// Singular solves, degenerate normal forms, broken invariants, unstable runs.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration documents.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace mussel
