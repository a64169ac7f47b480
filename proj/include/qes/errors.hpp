#pragma once

#include <stdexcept>
#include <string>

namespace qes {

/// Input violates a documented precondition (bad parameter, k out of range, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function was evaluated where it is not finite or outside its domain.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation hit (or came within the configured margin of) a declared singularity.
class SingularityError : public DomainError {
 public:
  SingularityError(const std::string& what, double where)
      : DomainError(what), location_(where) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

/// Operator could not be written in the requested sl(2) form.
class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qes
