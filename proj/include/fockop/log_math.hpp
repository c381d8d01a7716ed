#pragma once

// Log-domain arithmetic shared by the quadrature and norm code. Every
// integrand in this library is carried as log|f|, so sums go through
// log-sum-exp and never materialize values outside the double range.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fockop {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kPi = std::numbers::pi;

/// log(e^a + e^b) without overflow; -inf is the additive identity.
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(e^a - e^b) for a >= b.
inline double log_sub_exp(double a, double b) {
  if (b == kNegInf) return a;
  if (b >= a) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

/// log(1 + e^x), accurate for all x.
inline double log1p_exp(double x) {
  if (x > 35.0) return x + std::exp(-x);
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

/// Running log-sum-exp accumulator with a fixed summation order.
class LogSum {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term > shift_) {
      if (shift_ != kNegInf) sum_ *= std::exp(shift_ - log_term);
      shift_ = log_term;
    }
    sum_ += std::exp(log_term - shift_);
  }
  double value() const {
    if (shift_ == kNegInf) return kNegInf;
    return shift_ + std::log(sum_);
  }

 private:
  double shift_ = kNegInf;
  double sum_ = 0.0;
};

/// Golden-section maximization of a unimodal function on [lo, hi].
/// Returns the abscissa of the best point seen.
template <class F>
double golden_maximize(F&& f, double lo, double hi, double x_tol, int max_iter = 200) {
  constexpr double invphi = 0.6180339887498948482;
  double a = lo;
  double b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace fockop
