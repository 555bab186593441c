#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dnncover {

/// Base class for every domain failure raised by the library. The CLI maps
/// these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class DegenerateHullError : public Error {
 public:
  using Error::Error;
};

class InconsistentBoundaryError : public Error {
 public:
  using Error::Error;
};

class NoInteriorAgentError : public Error {
 public:
  using Error::Error;
};

/// Raised when some followers cannot be enclosed by any communication
/// simplex. `offending_ids()` lists them in ascending order.
class InfeasibleFormationError : public Error {
 public:
  InfeasibleFormationError(const std::string& what, std::vector<int> ids)
      : Error(what), ids_(std::move(ids)) {}
  const std::vector<int>& offending_ids() const { return ids_; }

 private:
  std::vector<int> ids_;
};

class SingularSimplexError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class CovarianceError : public Error {
 public:
  using Error::Error;
};

class DegenerateRegionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class TransformationError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class GainSpecError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class CoordinationError : public Error {
 public:
  using Error::Error;
};

class StalePlanError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace dnncover
