#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bpve {

/// Raised when a recursion produces a non-finite value. Carries the
/// generation at which it happened.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::size_t generation)
      : std::runtime_error(what + " (generation " + std::to_string(generation) + ")"),
        generation_(generation) {}

  std::size_t generation() const noexcept { return generation_; }

 private:
  std::size_t generation_;
};

/// A structural invariant (monotone counts, normalized weights, ...) failed.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Exhaustive enumeration would exceed its state budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bpve
