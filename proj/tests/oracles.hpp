#pragma once

// Brute-force references used only by the tests. Nothing here calls into the
// library's numerics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

/// max over a grid, re-gridded twice around the winner.
inline double grid_max(const std::function<double(double)>& f, double lo, double hi, int n = 20001) {
  double best = -std::numeric_limits<double>::infinity();
  double arg = lo;
  for (int pass = 0; pass < 3; ++pass) {
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
      const double x = lo + i * h;
      const double v = f(x);
      if (v > best) best = v, arg = x;
    }
    lo = arg - 2 * h;
    hi = arg + 2 * h;
  }
  return best;
}

/// sup_y (n y - Phi(y)) by grid search on [lo, hi].
inline double conjugate(const std::function<double(double)>& Phi, double n, double lo = -40.0, double hi = 10.0) {
  return grid_max([&](double y) { return n * y - Phi(y); }, lo, hi);
}

/// max_{0<=n<=n_max} (n x - conj[n]) with conj tabulated by the caller.
inline double envelope(const std::vector<double>& conj, double x) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < conj.size(); ++n) {
    const double v = (n == 0 ? 0.0 : n * x) - conj[n];
    best = std::max(best, v);
  }
  return best;
}

/// log of integral_0^R exp(h(r)) dr by composite Simpson, shifted by max h.
inline double simpson_log(const std::function<double(double)>& h, double lo, double hi, int n = 200000) {
  if (n % 2) ++n;
  const double step = (hi - lo) / n;
  std::vector<double> v(n + 1);
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    v[i] = h(lo + i * step);
    m = std::max(m, v[i]);
  }
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::exp(v[i] - m);
  }
  return m + std::log(s * step / 3.0);
}

/// log of the area integral of exp(h(x, y)) over [-L, L]^2, midpoint rule.
inline double plane_log(const std::function<double(double, double)>& h, double L, int n = 1200) {
  const double step = 2 * L / n;
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n) * n);
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      v.push_back(h(-L + (i + 0.5) * step, -L + (j + 0.5) * step));
      m = std::max(m, v.back());
    }
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s * step * step);
}

/// max over theta of log|p(r e^{i theta})| on a dense angular grid.
inline double circle_max(const std::vector<cplx>& coeffs, double r, int n = 200000) {
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const cplx z = std::polar(r, 2 * pi * k / n);
    cplx acc = 0.0, zk = 1.0;
    for (const cplx c : coeffs) acc += c * zk, zk *= z;
    best = std::max(best, std::log(std::abs(acc)));
  }
  return best;
}

/// Naive power-sum evaluation.
inline cplx eval(const std::vector<cplx>& coeffs, cplx z) {
  cplx acc = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) acc += coeffs[k] * std::pow(z, static_cast<double>(k));
  return acc;
}

inline std::vector<cplx> random_coeffs(std::mt19937_64& rng, int degree) {
  std::normal_distribution<double> n01;
  std::vector<cplx> c(degree + 1);
  for (auto& x : c) x = {n01(rng), n01(rng)};
  return c;
}

/// int_0^1 f(t) dt by composite Simpson.
inline cplx segment_integral(const std::function<cplx(double)>& f, int n = 20000) {
  const double h = 1.0 / n;
  cplx s = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace oracle
