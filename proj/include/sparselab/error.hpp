#pragma once

#include <stdexcept>
#include <string>

namespace sparselab {

// Every failure raised by the library derives from Error so callers (and the
// CLI) can catch one type and still tell the categories apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateColumnError : public Error {
 public:
  DegenerateColumnError(std::size_t column, const std::string& name)
      : Error("column " + name + " is constant (zero standard deviation)"),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  using Error::Error;
};

// Numerical failure inside an optimizer. `certificate` carries the quantity
// that proves the failure (e.g. the phase-one infeasibility of an LP).
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double certificate = 0.0)
      : Error(what), certificate_(certificate) {}
  double certificate() const noexcept { return certificate_; }

 private:
  double certificate_;
};

class SelectionTooLargeError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparselab
