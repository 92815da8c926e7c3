#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cavity_et {

/// A parameter or configuration value violates its invariant.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A non-Hermitian block is (numerically) defective: eigenvalues coalesce and
/// the eigenvector matrix cannot be inverted reliably.
class ExceptionalPointError : public std::runtime_error {
 public:
  ExceptionalPointError(const std::string& what, double eigenvalue_gap, double condition)
      : std::runtime_error(what), gap_(eigenvalue_gap), condition_(condition) {}

  double eigenvalue_gap() const noexcept { return gap_; }
  double condition_number() const noexcept { return condition_; }

 private:
  double gap_;
  double condition_;
};

/// Argument outside the domain an operation is defined on (e.g. M < 2 for dark states).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The jump process cannot advance: some rate is zero.
class StalledProcessError : public std::runtime_error {
 public:
  StalledProcessError(const std::string& what, long long ground_count)
      : std::runtime_error(what), ground_count_(ground_count) {}

  long long ground_count() const noexcept { return ground_count_; }

 private:
  long long ground_count_;
};

/// Hilbert-space size guard for the brute-force engines.
class DimensionError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Inconsistent state inside a trajectory (norm underflow, no available jump).
class TrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cavity_et
