#pragma once

#include <stdexcept>
#include <string>

namespace ucgap {

/// Inconsistent dimensions, masks or shapes.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Floating-point failure inside a numerical routine (singular matrix, non-finite value).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid user input: files, configuration, parameter values.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ucgap
