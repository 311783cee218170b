#pragma once

#include <stdexcept>
#include <string>

namespace diec {

/// Input violates a documented precondition (bad range, malformed state, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument is well formed but outside the region where a formula is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical self-check failed (oracle disagreement, invariant broken).
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace diec
