#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace typestate {

/// Malformed machine, model, or purpose description.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A word contains a symbol outside the machine's input alphabet.
class InputDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two machines that must share an alphabet do not.
class AlphabetMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured query or equivalence budget would be exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, long double required)
      : std::runtime_error(what), required_(required) {}

  /// The amount the operation would have needed (words, queries, ...).
  long double required() const noexcept { return required_; }

 private:
  long double required_;
};

}  // namespace typestate
