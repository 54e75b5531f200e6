#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace degen {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data (bad ids, duplicate strata, points off a face, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Some boundary coefficient exceeds 1, so no finite limit measure exists.
class NonSubLogCanonical : public Error {
 public:
  NonSubLogCanonical(const std::string& what, std::vector<std::string> offending)
      : Error(what), offending_(std::move(offending)) {}
  const std::vector<std::string>& offending() const { return offending_; }

 private:
  std::vector<std::string> offending_;
};

/// A quadrature or fit could not reach the requested tolerance.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

}  // namespace degen
