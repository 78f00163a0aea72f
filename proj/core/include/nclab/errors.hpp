#pragma once

#include <stdexcept>
#include <string>

namespace nclab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, algebras or dimensions do not line up.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input or a failed numerical routine.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation (p < 1, q >= p, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested lattice exceeds the configured point budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Invalid or incomplete scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A declared property (bound, certificate) is contradicted by data.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// A contraction fails one of its defining inequalities.
class ContractionRejected : public Error {
 public:
  ContractionRejected(std::string condition, const std::string& detail)
      : Error(condition + ": " + detail), condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nclab
