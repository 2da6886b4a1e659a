#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tefcorr {

/// Inconsistent or unsupported model definition (bad potential, dimension
/// mismatch, coordinate overflow, non-summable decay).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (overlapping
/// concatenation, empty configuration where a site is required, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exhaustive computation would exceed its enumeration budget.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::uint64_t required, std::uint64_t budget)
      : std::runtime_error(what + " (required " + std::to_string(required) +
                           ", budget " + std::to_string(budget) + ")"),
        required_(required),
        budget_(budget) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

/// A precondition on the field (e.g. the environment condition) is violated.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The contraction condition could not be certified for this field.
class GateError : public std::runtime_error {
 public:
  GateError(const std::string& what, double bound)
      : std::runtime_error(what), bound_(bound) {}
  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

/// Fixed-point iteration failed to converge.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double rate, std::size_t iterations)
      : std::runtime_error(what), rate_(rate), iterations_(iterations) {}
  double rate() const noexcept { return rate_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double rate_;
  std::size_t iterations_;
};

}  // namespace tefcorr
