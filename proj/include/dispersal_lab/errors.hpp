#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

/// Invalid argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// A theorem hypothesis (e.g. subcriticality) does not hold for the inputs.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative scheme failed to converge on malformed input.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dlab
