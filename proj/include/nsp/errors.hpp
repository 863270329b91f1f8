#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nsp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateShock : public Error {
 public:
  using Error::Error;
};

class LaxViolation : public Error {
 public:
  using Error::Error;
};

class NonPositiveVolume : public Error {
 public:
  using Error::Error;
};

class NoConnection : public Error {
 public:
  using Error::Error;
};

class UnexpectedSpectrum : public Error {
 public:
  using Error::Error;
};

class NewtonDiverged : public Error {
 public:
  NewtonDiverged(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

class ZeroDenominator : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Carries every violated invariant, not just the first one found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class IOError : public Error {
 public:
  using Error::Error;
};

}  // namespace nsp
