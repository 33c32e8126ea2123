#pragma once

#include <stdexcept>
#include <string>

namespace pulearn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: non-finite entries, mismatched dimensions, bad indices.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be positive definite is not (Gram matrix of the data,
/// row Gram of u, or the metric of a generalized eigenproblem).
/// `eigenvalue()` is the offending smallest eigenvalue.
class DegenerateError : public Error {
 public:
  DegenerateError(const std::string& what, double eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}

  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

}  // namespace pulearn
