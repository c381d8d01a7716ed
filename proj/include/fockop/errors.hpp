#pragma once

#include <stdexcept>
#include <string>

namespace fockop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or parameter outside its domain (e.g. a non-positive alpha).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied function produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// An iterative search failed to converge; carries the last bracket.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double lo, double hi)
      : Error(what + " (bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// A finite frame could not reach the requested lower constant.
class FrameError : public Error {
 public:
  FrameError(const std::string& what, double achievable)
      : Error(what + " (achievable delta " + std::to_string(achievable) + ")"),
        achievable_(achievable) {}
  double achievable_delta() const noexcept { return achievable_; }

 private:
  double achievable_;
};

/// The integrand was non-finite at an interior node.
class IntegrandError : public Error {
 public:
  IntegrandError(const std::string& what, double r)
      : Error(what + " at r=" + std::to_string(r)), r_(r) {}
  double radius() const noexcept { return r_; }

 private:
  double r_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace fockop
