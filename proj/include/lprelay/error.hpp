#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lprelay {

/// Malformed input text (config, matrix file).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a model invariant. Carries the offending field.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Argument outside the domain of a formula (zero vector, nonpositive bandwidth,
/// violated model hypothesis, wrong topology or CSI mode).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace lprelay
