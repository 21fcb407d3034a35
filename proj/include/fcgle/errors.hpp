#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fcgle {

/// Parameter outside the mathematical domain of an operation (e.g. alpha not in (1,2]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical kernel could not produce a usable result (eigensolver failure,
/// singular filter evaluation, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state detected during time marching.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace fcgle
