#pragma once

#include <stdexcept>
#include <string>

namespace srsp {

/// Invalid input: malformed files, bad parameters, broken graph invariants.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap. `residual` is the last change
/// (or mismatch) measured before giving up.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// (I - P) could not be factorized; the absorbing structure is broken.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace srsp
