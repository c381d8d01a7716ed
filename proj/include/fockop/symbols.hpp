#pragma once

// Polynomial entire symbols on C^d and affine self-maps.
//
// In one variable a symbol is a dense coefficient vector c_0..c_N; in d >= 2
// variables it is a sparse map from multi-indices to coefficients. Every
// operation keeps the representation exact up to floating-point rounding:
// derivatives, radial derivatives and affine compositions of polynomials are
// again polynomials.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fockop/errors.hpp"
#include "fockop/log_math.hpp"

namespace fockop {

using cplx = std::complex<double>;
using MultiIndex = std::vector<int>;

class EntireSymbol {
 public:
  /// The zero polynomial in one variable.
  EntireSymbol() = default;

  /// One-variable polynomial sum_k coeffs[k] z^k.
  explicit EntireSymbol(std::vector<cplx> coeffs) : dim_(1), dense_(std::move(coeffs)) {
    normalize();
  }

  /// Polynomial on C^dim from a multi-index map. dim == 1 is stored densely.
  EntireSymbol(int dim, const std::map<MultiIndex, cplx>& terms) : dim_(dim) {
    if (dim < 1) throw DimensionError("symbol dimension must be positive");
    for (const auto& [m, c] : terms) {
      if (static_cast<int>(m.size()) != dim) throw DimensionError("multi-index has wrong length");
      for (int mj : m)
        if (mj < 0) throw DomainError("negative exponent in multi-index");
    }
    if (dim == 1) {
      for (const auto& [m, c] : terms) {
        if (static_cast<std::size_t>(m[0]) >= dense_.size()) dense_.resize(m[0] + 1);
        dense_[m[0]] += c;
      }
    } else {
      for (const auto& [m, c] : terms) sparse_[m] += c;
    }
    normalize();
  }

  static EntireSymbol constant(cplx c, int dim = 1) {
    return EntireSymbol(dim, {{MultiIndex(dim, 0), c}});
  }

  static EntireSymbol monomial(int n, cplx c = 1.0) {
    std::vector<cplx> v(n + 1);
    v[n] = c;
    return EntireSymbol(std::move(v));
  }

  /// The coordinate function z_j on C^dim.
  static EntireSymbol variable(int j, int dim) {
    MultiIndex m(dim, 0);
    m.at(j) = 1;
    return EntireSymbol(dim, {{m, 1.0}});
  }

  int dimension() const noexcept { return dim_; }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    if (dim_ == 1) return static_cast<int>(dense_.size()) - 1;
    int deg = -1;
    for (const auto& [m, c] : sparse_) deg = std::max(deg, std::accumulate(m.begin(), m.end(), 0));
    return deg;
  }

  bool is_zero() const noexcept { return dim_ == 1 ? dense_.empty() : sparse_.empty(); }
  bool is_constant() const { return degree() <= 0; }

  /// Dense coefficients, d = 1 only.
  const std::vector<cplx>& coefficients() const {
    require_univariate("coefficients");
    return dense_;
  }

  /// Coefficient of z^n (d = 1), zero past the degree.
  cplx coefficient(int n) const {
    require_univariate("coefficient");
    return n >= 0 && n < static_cast<int>(dense_.size()) ? dense_[n] : cplx{};
  }

  /// All nonzero terms as a multi-index map (any dimension).
  std::map<MultiIndex, cplx> terms() const {
    if (dim_ != 1) return sparse_;
    std::map<MultiIndex, cplx> out;
    for (std::size_t k = 0; k < dense_.size(); ++k)
      if (dense_[k] != cplx{}) out[{static_cast<int>(k)}] = dense_[k];
    return out;
  }

  cplx at_origin() const {
    if (dim_ == 1) return dense_.empty() ? cplx{} : dense_[0];
    auto it = sparse_.find(MultiIndex(dim_, 0));
    return it == sparse_.end() ? cplx{} : it->second;
  }

  /// Horner evaluation, d = 1.
  cplx operator()(cplx z) const {
    require_univariate("scalar evaluation");
    cplx acc{};
    for (auto it = dense_.rbegin(); it != dense_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  /// Evaluation at a point of C^d.
  cplx operator()(std::span<const cplx> z) const {
    if (static_cast<int>(z.size()) != dim_) throw DimensionError("point dimension does not match symbol");
    if (dim_ == 1) return (*this)(z[0]);
    cplx acc{};
    for (const auto& [m, c] : sparse_) {
      cplx term = c;
      for (int j = 0; j < dim_; ++j)
        if (m[j] > 0) term *= std::pow(z[j], m[j]);
      acc += term;
    }
    return acc;
  }

  /// log|f(z)| for d = 1, safe for large |z| (evaluates z^N f(1/z) there).
  double log_abs(cplx z) const {
    require_univariate("log_abs");
    if (dense_.empty()) return kNegInf;
    const double r = std::abs(z);
    if (r <= 1.0) return std::log(std::abs((*this)(z)));
    const cplx w = 1.0 / z;
    cplx acc{};
    for (const cplx& c : dense_) acc = acc * w + c;
    return static_cast<double>(degree()) * std::log(r) + std::log(std::abs(acc));
  }

  /// log sum_k |c_k| r^k, an upper bound for log max_{|z|=r} |f|.
  double log_coefficient_bound(double r) const {
    LogSum s;
    const double lr = std::log(r);
    for (const auto& [m, c] : terms()) {
      const int k = std::accumulate(m.begin(), m.end(), 0);
      const double a = std::abs(c);
      if (a == 0.0) continue;
      s.add(std::log(a) + (k == 0 ? 0.0 : k * lr));
    }
    return s.value();
  }

  friend EntireSymbol operator+(const EntireSymbol& a, const EntireSymbol& b) {
    check_same_dim(a, b);
    if (a.dim_ == 1) {
      std::vector<cplx> v(std::max(a.dense_.size(), b.dense_.size()));
      for (std::size_t k = 0; k < a.dense_.size(); ++k) v[k] += a.dense_[k];
      for (std::size_t k = 0; k < b.dense_.size(); ++k) v[k] += b.dense_[k];
      return EntireSymbol(std::move(v));
    }
    auto t = a.sparse_;
    for (const auto& [m, c] : b.sparse_) t[m] += c;
    return EntireSymbol(a.dim_, t);
  }

  friend EntireSymbol operator-(const EntireSymbol& a, const EntireSymbol& b) { return a + (-1.0) * b; }

  friend EntireSymbol operator*(cplx s, const EntireSymbol& a) {
    if (a.dim_ == 1) {
      auto v = a.dense_;
      for (auto& c : v) c *= s;
      return EntireSymbol(std::move(v));
    }
    auto t = a.sparse_;
    for (auto& [m, c] : t) c *= s;
    return EntireSymbol(a.dim_, t);
  }
  friend EntireSymbol operator*(double s, const EntireSymbol& a) { return cplx(s) * a; }

  friend EntireSymbol operator*(const EntireSymbol& a, const EntireSymbol& b) {
    check_same_dim(a, b);
    if (a.is_zero() || b.is_zero()) return zero(a.dim_);
    if (a.dim_ == 1) {
      std::vector<cplx> v(a.dense_.size() + b.dense_.size() - 1);
      for (std::size_t i = 0; i < a.dense_.size(); ++i)
        for (std::size_t j = 0; j < b.dense_.size(); ++j) v[i + j] += a.dense_[i] * b.dense_[j];
      return EntireSymbol(std::move(v));
    }
    std::map<MultiIndex, cplx> t;
    for (const auto& [ma, ca] : a.sparse_)
      for (const auto& [mb, cb] : b.sparse_) {
        MultiIndex m(a.dim_);
        for (int j = 0; j < a.dim_; ++j) m[j] = ma[j] + mb[j];
        t[m] += ca * cb;
      }
    return EntireSymbol(a.dim_, t);
  }

  friend bool operator==(const EntireSymbol& a, const EntireSymbol& b) {
    return a.dim_ == b.dim_ && a.dense_ == b.dense_ && a.sparse_ == b.sparse_;
  }

  static EntireSymbol zero(int dim) {
    if (dim == 1) return EntireSymbol();
    return EntireSymbol(dim, {});
  }

 private:
  void normalize() {
    while (!dense_.empty() && dense_.back() == cplx{}) dense_.pop_back();
    std::erase_if(sparse_, [](const auto& kv) { return kv.second == cplx{}; });
    for (const auto& c : dense_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw DomainError("non-finite coefficient");
    for (const auto& [m, c] : sparse_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw DomainError("non-finite coefficient");
  }

  void require_univariate(const char* what) const {
    if (dim_ != 1) throw DimensionError(std::string(what) + " requires a one-variable symbol");
  }

  static void check_same_dim(const EntireSymbol& a, const EntireSymbol& b) {
    if (a.dim_ != b.dim_) throw DimensionError("symbol dimensions differ");
  }

  int dim_ = 1;
  std::vector<cplx> dense_;
  std::map<MultiIndex, cplx> sparse_;
};

/// phi(z) = beta z + gamma with scalar beta and gamma in C^d.
struct AffineMap {
  cplx beta = 1.0;
  std::vector<cplx> gamma{cplx{}};

  AffineMap() = default;
  AffineMap(cplx b, cplx g) : beta(b), gamma{g} {}
  AffineMap(cplx b, std::vector<cplx> g) : beta(b), gamma(std::move(g)) {
    if (gamma.empty()) throw DimensionError("affine map needs a translation vector");
  }

  static AffineMap identity(int dim = 1) { return AffineMap(1.0, std::vector<cplx>(dim)); }

  int dimension() const noexcept { return static_cast<int>(gamma.size()); }

  /// Euclidean norm of the translation.
  double gamma_norm() const {
    double s = 0.0;
    for (const auto& g : gamma) s += std::norm(g);
    return std::sqrt(s);
  }

  cplx operator()(cplx z) const {
    if (dimension() != 1) throw DimensionError("scalar affine evaluation requires d = 1");
    return beta * z + gamma[0];
  }

  std::vector<cplx> operator()(std::span<const cplx> z) const {
    if (static_cast<int>(z.size()) != dimension()) throw DimensionError("point dimension does not match map");
    std::vector<cplx> out(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = beta * z[j] + gamma[j];
    return out;
  }

  /// The map as a one-variable polynomial.
  EntireSymbol as_symbol() const {
    if (dimension() != 1) throw DimensionError("affine map as symbol requires d = 1");
    return EntireSymbol(std::vector<cplx>{gamma[0], beta});
  }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// R g = sum_j z_j dg/dz_j. Each monomial c z^m picks up the factor |m|.
inline EntireSymbol radial_derivative(const EntireSymbol& g) {
  if (g.dimension() == 1) {
    auto c = g.coefficients();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= static_cast<double>(k);
    return EntireSymbol(std::move(c));
  }
  auto t = g.terms();
  for (auto& [m, c] : t) c *= static_cast<double>(std::accumulate(m.begin(), m.end(), 0));
  return EntireSymbol(g.dimension(), t);
}

/// Left inverse of the radial derivative on polynomials vanishing at 0:
/// sum c_m z^m  ->  sum_{m != 0} c_m z^m / |m|. Equals int_0^1 P(tz) dt/t.
inline EntireSymbol inverse_radial(const EntireSymbol& p) {
  if (p.dimension() == 1) {
    auto c = p.coefficients();
    if (!c.empty()) c[0] = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) c[k] /= static_cast<double>(k);
    return EntireSymbol(std::move(c));
  }
  auto t = p.terms();
  std::map<MultiIndex, cplx> out;
  for (const auto& [m, c] : t) {
    const int k = std::accumulate(m.begin(), m.end(), 0);
    if (k > 0) out[m] = c / static_cast<double>(k);
  }
  return EntireSymbol(p.dimension(), out);
}

/// f'(z), d = 1.
inline EntireSymbol derivative(const EntireSymbol& f) {
  if (f.dimension() != 1) throw DimensionError("derivative requires d = 1");
  const auto& c = f.coefficients();
  if (c.size() <= 1) return EntireSymbol();
  std::vector<cplx> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
  return EntireSymbol(std::move(d));
}

/// Antiderivative vanishing at 0, d = 1.
inline EntireSymbol antiderivative(const EntireSymbol& f) {
  if (f.dimension() != 1) throw DimensionError("antiderivative requires d = 1");
  const auto& c = f.coefficients();
  std::vector<cplx> a(c.size() + 1);
  for (std::size_t k = 0; k < c.size(); ++k) a[k + 1] = c[k] / static_cast<double>(k + 1);
  return EntireSymbol(std::move(a));
}

/// f o p for one-variable polynomials (Horner over polynomial arithmetic).
inline EntireSymbol compose(const EntireSymbol& f, const EntireSymbol& p) {
  if (f.dimension() != 1 || p.dimension() != 1) throw DimensionError("polynomial composition requires d = 1");
  EntireSymbol acc;
  const auto& c = f.coefficients();
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * p + EntireSymbol::constant(*it);
  return acc;
}

/// f(beta z + gamma). In d = 1 the coefficients follow from the binomial
/// expansion; in d >= 2 each coordinate is substituted separately.
inline EntireSymbol compose_affine(const EntireSymbol& f, const AffineMap& phi) {
  if (f.dimension() != phi.dimension()) throw DimensionError("symbol and map dimensions differ");
  const int dim = f.dimension();
  if (dim == 1) {
    const auto& c = f.coefficients();
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<cplx> out(c.size());
    const cplx b = phi.beta;
    const cplx g = phi.gamma[0];
    // Pascal's row built incrementally keeps the binomials exact for moderate n.
    std::vector<double> binom{1.0};
    for (int k = 0; k <= n; ++k) {
      if (k > 0) {
        std::vector<double> next(k + 1, 1.0);
        for (int j = 1; j < k; ++j) next[j] = binom[j - 1] + binom[j];
        binom = std::move(next);
      }
      if (c[k] == cplx{}) continue;
      for (int j = 0; j <= k; ++j) out[j] += c[k] * binom[j] * std::pow(b, j) * std::pow(g, k - j);
    }
    return EntireSymbol(std::move(out));
  }
  EntireSymbol acc = EntireSymbol::zero(dim);
  for (const auto& [m, c] : f.terms()) {
    EntireSymbol term = EntireSymbol::constant(c, dim);
    for (int j = 0; j < dim; ++j) {
      if (m[j] == 0) continue;
      const EntireSymbol lin =
          phi.beta * EntireSymbol::variable(j, dim) + EntireSymbol::constant(phi.gamma[j], dim);
      for (int e = 0; e < m[j]; ++e) term = term * lin;
    }
    acc = acc + term;
  }
  return acc;
}

struct CircleMax {
  double log_max;          ///< max over |z| = r of log|f(z)|
  double log_upper_bound;  ///< log sum |c_k| r^k
  double argument;         ///< angle of the maximizer
};

/// Maximum of log|f| on the circle |z| = r by angular sampling followed by
/// golden-section refinement around the best local maxima.
inline CircleMax circle_max_log(const EntireSymbol& f, double r, int nodes = 256) {
  if (f.dimension() != 1) throw DimensionError("circle maximum requires d = 1");
  if (f.is_zero()) return {kNegInf, kNegInf, 0.0};
  const double upper = f.log_coefficient_bound(r);
  if (r == 0.0 || f.degree() == 0) return {std::log(std::abs(f.at_origin())), upper, 0.0};
  const auto at = [&](double theta) { return f.log_abs(std::polar(r, theta)); };
  const double step = 2.0 * kPi / nodes;
  std::vector<double> v(nodes);
  for (int k = 0; k < nodes; ++k) v[k] = at(k * step);
  std::vector<int> peaks;
  for (int k = 0; k < nodes; ++k) {
    const double prev = v[(k + nodes - 1) % nodes];
    const double next = v[(k + 1) % nodes];
    if (v[k] >= prev && v[k] >= next) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return v[a] > v[b]; });
  if (peaks.size() > 3) peaks.resize(3);
  int best_k = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
  double best = v[best_k];
  double best_theta = best_k * step;
  for (int k : peaks) {
    const double theta = golden_maximize(at, (k - 1) * step, (k + 1) * step, 1e-13);
    const double val = at(theta);
    if (val > best) {
      best = val;
      best_theta = theta;
    }
  }
  // Rounding can push the refined maximum a hair past the coefficient bound.
  return {std::min(best, upper), upper, std::remainder(best_theta, 2.0 * kPi)};
}

}  // namespace fockop
