#pragma once

// Volterra-type, companion and weighted composition operators acting on
// polynomial symbols, Fock norms computed two ways, and the normalized
// reproducing kernels of F_alpha^2.
//
// Operator images of polynomials are again polynomials, so every operator is
// applied by exact coefficient algebra:
//
//   V_g^phi f        = Rinv[(f o phi) * Rg]          (Rinv = inverse radial derivative)
//   C_phi V_g f      = (int_0^. f g') o phi
//   K_g f            = Rinv[Rf * g]
//   K_g^phi f        = int_0^. (f' o phi) g
//   Ktilde_{phi,g} f = (int_0^. f' g) o phi
//   C_phi^g f        = g * (f o phi)

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fockop/errors.hpp"
#include "fockop/log_math.hpp"
#include "fockop/quadrature.hpp"
#include "fockop/symbols.hpp"
#include "fockop/weights.hpp"

namespace fockop {

enum class OperatorKind {
  volterra,              ///< V_g^phi = V_g o C_phi
  composition_volterra,  ///< C_phi o V_g
  companion,             ///< K_g
  companion_composed,    ///< K_g^phi
  companion_outer,       ///< Ktilde_{phi,g}
  weighted_composition,  ///< C_phi^g
};

inline std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::volterra: return "V";
    case OperatorKind::composition_volterra: return "CV";
    case OperatorKind::companion: return "Kg";
    case OperatorKind::companion_composed: return "K";
    case OperatorKind::companion_outer: return "KT";
    case OperatorKind::weighted_composition: return "WC";
  }
  return "?";
}

/// Kinds whose definition goes through line integrals or derivatives of
/// compositions; these live on C only.
inline bool requires_one_variable(OperatorKind k) {
  return k == OperatorKind::composition_volterra || k == OperatorKind::companion_composed ||
         k == OperatorKind::companion_outer;
}

/// A holomorphic self-map: affine on C^d, or a one-variable polynomial.
using SelfMap = std::variant<AffineMap, EntireSymbol>;

inline int dimension(const SelfMap& phi) {
  return std::visit([](const auto& m) { return m.dimension(); }, phi);
}

inline std::optional<AffineMap> as_affine(const SelfMap& phi) {
  if (const auto* a = std::get_if<AffineMap>(&phi)) return *a;
  const auto& p = std::get<EntireSymbol>(phi);
  if (p.dimension() == 1 && p.degree() <= 1) return AffineMap(p.coefficient(1), p.coefficient(0));
  return std::nullopt;
}

inline EntireSymbol compose(const EntireSymbol& f, const SelfMap& phi) {
  if (const auto* a = std::get_if<AffineMap>(&phi)) return compose_affine(f, *a);
  return compose(f, std::get<EntireSymbol>(phi));
}

/// phi as a one-variable polynomial.
inline EntireSymbol as_symbol(const SelfMap& phi) {
  if (const auto* a = std::get_if<AffineMap>(&phi)) return a->as_symbol();
  const auto& p = std::get<EntireSymbol>(phi);
  if (p.dimension() != 1) throw DimensionError("polynomial self-maps are one-variable");
  return p;
}

inline cplx apply_map(const SelfMap& phi, cplx z) {
  if (const auto* a = std::get_if<AffineMap>(&phi)) return (*a)(z);
  return std::get<EntireSymbol>(phi)(z);
}

/// The image T f as a polynomial.
inline EntireSymbol apply_operator(OperatorKind kind, const EntireSymbol& g, const SelfMap& phi,
                                   const EntireSymbol& f) {
  if (g.dimension() != f.dimension() || dimension(phi) != f.dimension())
    throw DimensionError("operator symbols have mismatched dimensions");
  if (requires_one_variable(kind) && f.dimension() != 1)
    throw DimensionError(to_string(kind) + " is defined in one variable only");
  switch (kind) {
    case OperatorKind::volterra:
      return inverse_radial(compose(f, phi) * radial_derivative(g));
    case OperatorKind::composition_volterra:
      return compose(antiderivative(f * derivative(g)), phi);
    case OperatorKind::companion:
      return inverse_radial(radial_derivative(f) * g);
    case OperatorKind::companion_composed:
      return antiderivative(compose(derivative(f), phi) * g);
    case OperatorKind::companion_outer:
      return compose(antiderivative(derivative(f) * g), phi);
    case OperatorKind::weighted_composition:
      return g * compose(f, phi);
  }
  throw UnsupportedError("unknown operator kind");
}

/// (V_g^phi f)(z).
inline cplx volterra_eval(const EntireSymbol& g, const SelfMap& phi, const EntireSymbol& f,
                          std::span<const cplx> z) {
  return apply_operator(OperatorKind::volterra, g, phi, f)(z);
}
inline cplx volterra_eval(const EntireSymbol& g, const SelfMap& phi, const EntireSymbol& f, cplx z) {
  return volterra_eval(g, phi, f, std::span<const cplx>(&z, 1));
}

/// Companion-type and C_phi o V_g evaluations.
inline cplx companion_eval(OperatorKind kind, const EntireSymbol& g, const SelfMap& phi, const EntireSymbol& f,
                           cplx z) {
  if (kind == OperatorKind::volterra || kind == OperatorKind::weighted_composition)
    throw DomainError("companion_eval expects a companion kind or C_phi V_g");
  return apply_operator(kind, g, phi, f)(z);
}

struct OperatorSpec {
  OperatorKind kind = OperatorKind::volterra;
  EntireSymbol g;
  SelfMap phi = AffineMap::identity();
  WeightFunction source = WeightFunction::gaussian(1.0);
  double alpha = 1.0;  ///< target Fock parameter
  double q = 2.0;      ///< target exponent; +inf for the growth space
  int d = 1;

  void validate() const {
    if (d < 1) throw DimensionError("dimension must be positive");
    if (g.dimension() != d || dimension(phi) != d) throw DimensionError("symbol dimensions do not match d");
    if (requires_one_variable(kind) && d != 1) throw DimensionError(to_string(kind) + " requires d = 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    if (!(q > 0.0)) throw DomainError("q must be positive");
  }
};

enum class NormMethod { direct, derivative };

namespace detail {

// A one-variable polynomial with a single nonzero coefficient has |f|
// constant on circles.
inline std::optional<std::pair<int, double>> single_term(const EntireSymbol& f) {
  if (f.dimension() != 1 || f.is_zero()) return std::nullopt;
  const auto& c = f.coefficients();
  int count = 0, k = -1;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != cplx{}) {
      ++count;
      k = static_cast<int>(i);
    }
  if (count != 1) return std::nullopt;
  return std::make_pair(k, std::log(std::abs(c[k])));
}

// sup_{r >= 0} P(r) over a log-spaced grid plus r = 0, with golden refinement
// around the grid maximizer.
template <class P>
double sup_radial(P&& profile, const QuadratureOptions& o) {
  const auto grid = geometric_grid(o.r_min, o.r_cap, o.scan_points);
  double best = profile(0.0);
  std::size_t ib = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = profile(grid[i]);
    if (std::isnan(v)) throw IntegrandError("non-finite profile", grid[i]);
    if (v > best) {
      best = v;
      ib = i;
    }
  }
  if (best == kInf) return kInf;
  if (ib == grid.size()) return best;
  const double lo = ib == 0 ? 0.0 : grid[ib - 1];
  const double hi = ib + 1 == grid.size() ? grid[ib] : grid[ib + 1];
  const double x = golden_maximize(profile, lo, hi, 1e-13 * std::max(1.0, hi));
  return std::max(best, profile(x));
}

inline double log_abs_at(const EntireSymbol& f, double r, double theta) {
  return f.log_abs(std::polar(r, theta));
}

// One-variable F_alpha^p norm (log) of a single-term polynomial c z^n.
inline double monomial_norm_1d(int n, double log_c, double alpha, double p, const QuadratureOptions& o) {
  if (std::isinf(p)) {
    return log_c + sup_radial([&](double r) { return n == 0 ? 0.0 : n * std::log(r) - 0.5 * alpha * r * r; }, o);
  }
  const auto res = integrate_radial(
      [&](double r) { return p * n * std::log(r) + std::log(r) - 0.5 * alpha * p * r * r; }, o);
  return log_c + (std::log(alpha * p / (2.0 * kPi)) + std::log(2.0 * kPi) + res.log_value) / p;
}

}  // namespace detail

/// log ||F||_{F_alpha^p(C)} for a function given by its log-modulus
/// z -> log|F(z)| (direct definition; polar quadrature or radial supremum).
template <class LogAbs>
double fock_norm_of(LogAbs&& log_abs, double alpha, double p, const QuadratureOptions& o = {}) {
  if (!(alpha > 0.0) || !(p > 0.0)) throw DomainError("fock norm needs alpha > 0 and p > 0");
  if (std::isinf(p)) {
    return detail::sup_radial(
        [&](double r) {
          double m = kNegInf;
          for (int j = 0; j < 256; ++j) m = std::max(m, log_abs(std::polar(r, 2.0 * kPi * j / 256)));
          return m - 0.5 * alpha * r * r;
        },
        o);
  }
  const auto res = integrate_polar(
      [&](double r, double t) { return p * log_abs(std::polar(r, t)) - 0.5 * alpha * p * r * r; }, o);
  return (std::log(alpha * p / (2.0 * kPi)) + res.log_value) / p;
}

/// log ||f||_{F_alpha^p(C)} from the defining integral (or supremum), never
/// the coefficient formula: radial reduction for single-term f, polar
/// quadrature otherwise.
inline double fock_norm_by_quadrature(const EntireSymbol& f, double alpha, double p, const QuadratureOptions& o = {}) {
  if (!(alpha > 0.0) || !(p > 0.0)) throw DomainError("fock norm needs alpha > 0 and p > 0");
  if (f.dimension() != 1) throw DimensionError("quadrature norm is one-variable");
  if (f.is_zero()) return kNegInf;
  if (auto st = detail::single_term(f)) return detail::monomial_norm_1d(st->first, st->second, alpha, p, o);
  if (std::isinf(p))
    return detail::sup_radial([&](double r) { return circle_max_log(f, r).log_max - 0.5 * alpha * r * r; }, o);
  const auto res = integrate_polar(
      [&](double r, double t) { return p * detail::log_abs_at(f, r, t) - 0.5 * alpha * p * r * r; }, o);
  return (std::log(alpha * p / (2.0 * kPi)) + res.log_value) / p;
}

/// log ||f||_{F_alpha^p(C^d)}.
///
/// direct: the defining integral (radial reduction for single-term f,
///   coefficient orthogonality for p = 2, polar quadrature otherwise).
/// derivative: log( || |Rf| (1+|z|)^-2 e^{-alpha|z|^2/2} ||_{L^p} + |f(0)| ).
inline double fock_norm(const EntireSymbol& f, double alpha, double p, int d, NormMethod method,
                        const QuadratureOptions& o = {}) {
  if (!(alpha > 0.0) || !(p > 0.0)) throw DomainError("fock norm needs alpha > 0 and p > 0");
  if (f.dimension() != d) throw DimensionError("symbol dimension does not match d");
  if (f.is_zero()) return kNegInf;
  const bool inf = std::isinf(p);

  if (method == NormMethod::direct) {
    if (!inf && p == 2.0) {
      // ||z^m||^2 = m! / alpha^|m| per coordinate; monomials are orthogonal.
      LogSum s;
      for (const auto& [m, c] : f.terms()) {
        double lt = 2.0 * std::log(std::abs(c));
        for (int mj : m) lt += std::lgamma(mj + 1.0) - mj * std::log(alpha);
        s.add(lt);
      }
      return 0.5 * s.value();
    }
    if (d == 1) return fock_norm_by_quadrature(f, alpha, p, o);
    const auto terms = f.terms();
    if (terms.size() != 1) throw UnsupportedError("direct norm in d >= 2 supports single monomials or p = 2");
    const auto& [m, c] = *terms.begin();
    double total = std::log(std::abs(c));
    for (int mj : m) total += detail::monomial_norm_1d(mj, 0.0, alpha, p, o);
    return total;
  }

  if (d != 1) throw UnsupportedError("derivative norm is implemented for d = 1");
  const EntireSymbol rf = radial_derivative(f);
  const double f0 = std::abs(f.at_origin());
  const double log_f0 = f0 > 0.0 ? std::log(f0) : kNegInf;
  if (rf.is_zero()) return log_f0;
  double L;
  const auto st = detail::single_term(rf);
  const auto base = [&](double r) { return -2.0 * std::log1p(r) - 0.5 * alpha * r * r; };
  if (inf) {
    if (st) {
      L = st->second + detail::sup_radial([&](double r) { return st->first * std::log(r) + base(r); }, o);
    } else {
      L = detail::sup_radial([&](double r) { return circle_max_log(rf, r).log_max + base(r); }, o);
    }
  } else if (st) {
    const auto res = integrate_radial(
        [&](double r) { return p * (st->first * std::log(r) + base(r)) + std::log(r); }, o);
    L = st->second + (std::log(2.0 * kPi) + res.log_value) / p;
  } else {
    const auto res = integrate_polar(
        [&](double r, double t) { return p * (detail::log_abs_at(rf, r, t) + base(r)); }, o);
    L = res.log_value / p;
  }
  return log_add_exp(L, log_f0);
}

/// Normalized reproducing kernel k_{w,alpha}(z) = exp(alpha <z, w> - alpha |w|^2 / 2).
class KernelFunction {
 public:
  KernelFunction(std::vector<cplx> w, double alpha) : w_(std::move(w)), alpha_(alpha) {
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    if (w_.empty()) throw DimensionError("kernel point must have positive dimension");
  }
  KernelFunction(cplx w, double alpha) : KernelFunction(std::vector<cplx>{w}, alpha) {}

  int dimension() const noexcept { return static_cast<int>(w_.size()); }
  double alpha() const noexcept { return alpha_; }
  const std::vector<cplx>& center() const noexcept { return w_; }

  double center_norm_sq() const {
    double s = 0.0;
    for (const auto& x : w_) s += std::norm(x);
    return s;
  }

  cplx log_value(std::span<const cplx> z) const {
    check(z);
    cplx ip{};
    for (std::size_t j = 0; j < w_.size(); ++j) ip += z[j] * std::conj(w_[j]);
    return alpha_ * ip - 0.5 * alpha_ * center_norm_sq();
  }

  cplx operator()(std::span<const cplx> z) const { return std::exp(log_value(z)); }
  cplx operator()(cplx z) const { return (*this)(std::span<const cplx>(&z, 1)); }

  /// log|k(z)| = alpha Re<z, w> - alpha |w|^2 / 2.
  double log_abs(std::span<const cplx> z) const { return log_value(z).real(); }
  double log_abs(cplx z) const { return log_abs(std::span<const cplx>(&z, 1)); }

  /// log of |k(z)| e^{-alpha|z|^2/2} = -alpha |z - w|^2 / 2.
  double log_profile(std::span<const cplx> z) const {
    check(z);
    double s = 0.0;
    for (std::size_t j = 0; j < w_.size(); ++j) s += std::norm(z[j] - w_[j]);
    return -0.5 * alpha_ * s;
  }

  /// The profile peaks at z = w with value 1.
  double log_growth_norm() const { return 0.0; }

  /// Taylor polynomial e^{-alpha|w|^2/2} sum_{n <= N} (alpha conj(w))^n z^n / n!  (d = 1).
  EntireSymbol taylor(int degree) const {
    if (dimension() != 1) throw DimensionError("kernel Taylor polynomial requires d = 1");
    std::vector<cplx> c(degree + 1);
    const cplx a = alpha_ * std::conj(w_[0]);
    const double lead = -0.5 * alpha_ * center_norm_sq();
    for (int n = 0; n <= degree; ++n) {
      if (a == cplx{} && n > 0) break;
      const double lg = lead - std::lgamma(n + 1.0) + (n == 0 ? 0.0 : n * std::log(std::abs(a)));
      c[n] = std::polar(std::exp(lg), n * std::arg(a));
    }
    return EntireSymbol(std::move(c));
  }

  /// Degree ceil(alpha|w|^2 + 8 sqrt(alpha)|w| + 16).
  static int truncation_degree(double alpha, double w_abs) {
    return static_cast<int>(std::ceil(alpha * w_abs * w_abs + 8.0 * std::sqrt(alpha) * w_abs + 16.0));
  }

 private:
  void check(std::span<const cplx> z) const {
    if (z.size() != w_.size()) throw DimensionError("point dimension does not match kernel");
  }
  std::vector<cplx> w_;
  double alpha_;
};

inline KernelFunction kernel_function(cplx w, double alpha) { return KernelFunction(w, alpha); }

/// |R(V_g^phi f)(z) - f(phi(z)) Rg(z)| / (1 + |f(phi(z)) Rg(z)|), with the left
/// side from a central difference along t -> tz.
inline double radial_identity_check(const EntireSymbol& g, const SelfMap& phi, const EntireSymbol& f,
                                    std::span<const cplx> z, double h = 1e-5) {
  bool nonzero = false;
  for (const auto& x : z) nonzero = nonzero || x != cplx{};
  if (!nonzero) throw DomainError("radial identity check needs z != 0");
  const EntireSymbol v = apply_operator(OperatorKind::volterra, g, phi, f);
  std::vector<cplx> zp(z.begin(), z.end()), zm(z.begin(), z.end());
  for (std::size_t j = 0; j < z.size(); ++j) {
    zp[j] *= 1.0 + h;
    zm[j] *= 1.0 - h;
  }
  const cplx fd = (v(zp) - v(zm)) / (2.0 * h);
  cplx phiz;
  std::vector<cplx> phiv;
  cplx fphi;
  if (const auto* a = std::get_if<AffineMap>(&phi)) {
    phiv = (*a)(z);
    fphi = f(phiv);
  } else {
    phiz = std::get<EntireSymbol>(phi)(z);
    fphi = f(phiz);
  }
  const cplx rhs = fphi * radial_derivative(g)(z);
  return std::abs(fd - rhs) / (1.0 + std::abs(rhs));
}

inline double radial_identity_check(const EntireSymbol& g, const SelfMap& phi, const EntireSymbol& f, cplx z,
                                    double h = 1e-5) {
  return radial_identity_check(g, phi, f, std::span<const cplx>(&z, 1), h);
}

}  // namespace fockop
