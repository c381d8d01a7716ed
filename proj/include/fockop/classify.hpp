#pragma once

// Boundedness decisions for the operator families in operators.hpp, Carleson
// measure checks for growth spaces, and the Gaussian (Berezin-type) reduction
// of double-integral conditions.
//
// Every criterion has the shape "profile P(z) in L^q" (or in L^infty). The
// symbolic path applies to affine phi(z) = beta z + gamma and Gaussian-family
// weights, where
//
//   q log P(z) = a r^2 + b r + kappa_0 log r + O(1),   r = |z|,
//
// and the verdict follows from (a, b, kappa_total = q p + 2d - 1). The numeric
// path integrates q log P with polar quadrature and reads the same three
// coefficients off a least-squares tail fit.

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fockop/errors.hpp"
#include "fockop/log_math.hpp"
#include "fockop/operators.hpp"
#include "fockop/quadrature.hpp"
#include "fockop/symbols.hpp"
#include "fockop/weights.hpp"

namespace fockop {

enum class Status { bounded, unbounded, inconclusive };
enum class Path { symbolic, numeric };
enum class PathChoice { automatic, symbolic, numeric };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::bounded: return "bounded";
    case Status::unbounded: return "unbounded";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}
inline std::string to_string(Path p) { return p == Path::symbolic ? "symbolic" : "numeric"; }

struct Verdict {
  Status status = Status::inconclusive;
  std::string criterion;
  Path path = Path::symbolic;
  double a = kNaN;
  double b = kNaN;
  double kappa = kNaN;
  double log_integral = kNaN;  ///< log of the criterion integral (or sup for q = inf)
  bool compact_note = false;   ///< q < inf: bounded implies compact
  std::string detail;

  bool decisive() const noexcept { return status != Status::inconclusive; }
};

/// Quadrature defaults for criteria: verdicts need far less than full
/// precision, and envelope kinks make tight tolerances expensive.
inline QuadratureOptions criterion_quadrature() {
  QuadratureOptions o;
  o.rel_tol = 1e-8;
  o.stop_when_undecided = true;
  return o;
}

struct ClassifyOptions {
  PathChoice path = PathChoice::automatic;
  QuadratureOptions quad = criterion_quadrature();
  /// Envelope slopes; large enough that the envelope does not saturate on
  /// the scan window for the built-in weights.
  std::int64_t n_max = std::int64_t{1} << 32;
  double symbolic_rel_tol = 1e-12;
};

namespace detail {

struct GaussAsymptotics {
  double alpha;  ///< Gaussian exponent of the (associated) weight
  double power;  ///< polynomial power
};

// Weights whose associated weight is exactly polynomial-times-Gaussian up to
// constants.
inline std::optional<GaussAsymptotics> symbolic_weight(const WeightFunction& w) {
  if (const auto* g = std::get_if<Gaussian>(&w.kind())) return GaussAsymptotics{g->alpha, 0.0};
  if (const auto* g = std::get_if<GaussianPoly>(&w.kind())) return GaussAsymptotics{g->alpha, double(g->m)};
  return std::nullopt;
}

inline bool near_zero(double x, double scale, double rel) { return std::abs(x) <= rel * std::max(scale, 1e-300); }

inline Verdict zero_operator(const std::string& criterion, double q) {
  Verdict v;
  v.status = Status::bounded;
  v.criterion = criterion;
  v.path = Path::symbolic;
  v.a = v.b = v.kappa = 0.0;
  v.log_integral = kNegInf;
  v.compact_note = !std::isinf(q);
  v.detail = "zero operator";
  return v;
}

// Verdict from the symbolic expansion. a_scale / b_scale are the magnitudes
// entering a and b, for the relative zero test.
inline Verdict symbolic_verdict(double a, double a_scale, double b, double b_scale, double p, double q, int d,
                                const std::string& criterion, double rel) {
  Verdict v;
  v.criterion = criterion;
  v.path = Path::symbolic;
  v.compact_note = !std::isinf(q);
  const bool a0 = near_zero(a, a_scale, rel);
  const bool b0 = near_zero(b, b_scale, rel);
  v.a = a0 ? 0.0 : a;
  v.b = b0 ? 0.0 : b;
  if (std::isinf(q)) {
    v.kappa = p;
    if (!a0) v.status = a < 0.0 ? Status::bounded : Status::unbounded;
    else if (!b0) v.status = b < 0.0 ? Status::bounded : Status::unbounded;
    else v.status = p <= 0.0 ? Status::bounded : Status::unbounded;
    return v;
  }
  v.kappa = q * p + 2.0 * d - 1.0;
  if (!a0) v.status = a < 0.0 ? Status::bounded : Status::unbounded;
  else if (!b0) v.status = b < 0.0 ? Status::bounded : Status::unbounded;
  else v.status = v.kappa < -1.0 ? Status::bounded : Status::unbounded;
  return v;
}

inline Verdict fill_fit(Verdict v, const TailFit& t) {
  v.a = t.a;
  v.b = t.b;
  v.kappa = t.kappa;
  return v;
}

// Numeric decision for "e^{h} in L^1(C)" where h = q log P is given in polar
// coordinates (the r dr measure is added by the quadrature).
template <class PolarLog>
Verdict numeric_lq(PolarLog&& h, const std::string& criterion, const QuadratureOptions& o) {
  Verdict v;
  v.criterion = criterion;
  v.path = Path::numeric;
  v.compact_note = true;
  const QuadratureResult res = integrate_polar(h, o);
  v = fill_fit(v, res.tail);
  if (res.tail.vanishing && res.log_value == kNegInf) {
    v.status = Status::bounded;
    v.log_integral = kNegInf;
    v.detail = "profile vanishes identically";
    return v;
  }
  const int decay = tail_integrability(res.tail, o);
  const bool power_certificate = power_law_tail(res.tail, o) && std::isfinite(res.tail_log_estimate);
  if (decay > 0) {
    v.status = Status::unbounded;
    v.detail = "divergent tail";
  } else if (res.converged || power_certificate) {
    v.status = Status::bounded;
    v.log_integral = res.converged ? res.log_value : log_add_exp(res.log_value, res.tail_log_estimate);
    v.detail = res.converged ? "quadrature converged" : "power-law tail beyond the cap";
  } else {
    v.status = Status::inconclusive;
    v.detail = res.tail.rank_deficient ? "tail fit rank deficient" : "tail inside the decision band";
  }
  return v;
}

// +1 unbounded, -1 bounded, 0 undecidable, for a log-profile fit in L^infty:
// bounded iff a <= 0 and (a = 0 => b <= 0 and (b = 0 => kappa <= 0)).
inline int sup_decision(const TailFit& t, const QuadratureOptions& o) {
  if (t.vanishing) return -1;
  if (t.rank_deficient && !t.constant) return 0;
  const auto m = effective_margins(t, o);
  if (t.a > m.a) return 1;
  if (t.a < -m.a) return -1;
  if (t.b > m.b) return 1;
  if (t.b < -m.b) return -1;
  return t.kappa > m.kappa ? 1 : -1;
}

// Numeric decision for a radial log-profile m(r) in L^q(C^d) via its radial
// majorant: the integrand is m(r) q + (2d - 1) log r.
template <class Radial>
Verdict numeric_majorant(Radial&& m, double q, int d, const std::string& criterion, const QuadratureOptions& o) {
  Verdict v;
  v.criterion = criterion + " (radial majorant)";
  v.path = Path::numeric;
  v.compact_note = !std::isinf(q);
  if (std::isinf(q)) {
    const auto fit_grid = geometric_grid(o.fit_r_lo, 4.0 * o.fit_r_lo, o.fit_points);
    const TailFit t = tail_slope_fit(m, fit_grid);
    v = fill_fit(v, t);
    if (sup_decision(t, o) < 0) {
      v.status = Status::bounded;
      v.log_integral = sup_radial(m, o);
    } else {
      v.status = Status::inconclusive;
      v.detail = "majorant unbounded; no lower certificate";
    }
    return v;
  }
  const double lr_area = std::log(2.0) + d * std::log(kPi) - std::lgamma(double(d));
  const auto res = integrate_radial(
      [&](double r) {
        const double x = m(r);
        return x == kNegInf ? kNegInf : q * x + (2.0 * d - 1.0) * std::log(r);
      },
      o);
  v = fill_fit(v, res.tail);
  const bool power_certificate = power_law_tail(res.tail, o) && std::isfinite(res.tail_log_estimate);
  if (res.converged || power_certificate || (res.tail.vanishing && res.log_value == kNegInf)) {
    v.status = Status::bounded;
    v.log_integral = res.log_value == kNegInf ? kNegInf : lr_area + res.log_value;
  } else {
    v.status = Status::inconclusive;
    v.detail = "majorant not integrable; no lower certificate";
  }
  return v;
}

// L^infty decision for a profile sampled on circles.
template <class CircleMaxLog>
Verdict numeric_sup(CircleMaxLog&& m, const std::string& criterion, const QuadratureOptions& o) {
  Verdict v;
  v.criterion = criterion;
  v.path = Path::numeric;
  v.compact_note = false;
  const auto fit_grid = geometric_grid(o.fit_r_lo, 4.0 * o.fit_r_lo, o.fit_points);
  const TailFit t = tail_slope_fit(m, fit_grid);
  v = fill_fit(v, t);
  const int s = sup_decision(t, o);
  if (s == 0) {
    v.status = Status::inconclusive;
    v.detail = "tail fit rank deficient";
    return v;
  }
  v.status = s > 0 ? Status::unbounded : Status::bounded;
  if (s < 0) v.log_integral = sup_radial(m, o);
  return v;
}

inline double circle_max_of(const std::function<double(cplx)>& f, double r, int nodes = 256) {
  double best = kNegInf;
  for (int j = 0; j < nodes; ++j) best = std::max(best, f(std::polar(r, 2.0 * kPi * j / nodes)));
  if (r == 0.0) return f(cplx{});
  return best;
}

// Generic one-variable numeric classification of a log-profile log P(z).
inline Verdict numeric_profile(const std::function<double(cplx)>& log_p, double q, const std::string& criterion,
                               const QuadratureOptions& o) {
  if (std::isinf(q))
    return numeric_sup([&](double r) { return circle_max_of(log_p, r); }, criterion, o);
  return numeric_lq([&](double r, double t) { return q * log_p(std::polar(r, t)); }, criterion, o);
}

inline double safe_log_abs(cplx z) {
  const double m = std::abs(z);
  return m == 0.0 ? kNegInf : std::log(m);
}

inline bool use_symbolic(PathChoice c, bool available) {
  if (c == PathChoice::symbolic && !available) throw UnsupportedError("symbolic path needs an affine map and a Gaussian-family weight");
  return c == PathChoice::symbolic || (c == PathChoice::automatic && available);
}

inline void check_q(double q) {
  if (!(q > 0.0)) throw DomainError("q must be positive");
}

}  // namespace detail

inline const char* kCriterionVolterra =
    "volterra growth-to-Fock: |Rg(z)| (1+|z|)^-2 e^{-alpha|z|^2/2} w~(|phi(z)|) in L^q";
inline const char* kCriterionCmpg =
    "composition-volterra: |g'(phi(z)) phi'(z)| (1+|z|)^-1 w~(|phi(z)|) e^{-alpha|z|^2/2} in L^q "
    "[g' evaluated at phi(z) as derived; the stated form reads g'(z)]";
inline const char* kCriterionCompanion =
    "companion K_g^phi: (1+|phi(z)|)/(1+|z|) |g(z)| e^{alpha(|phi(z)|^2-|z|^2)/2} in L^q";
inline const char* kCriterionCompanionOuter =
    "companion Ktilde_{phi,g}: (1+|phi(z)|)/(1+|z|) |g(phi(z)) phi'(z)| e^{alpha(|phi(z)|^2-|z|^2)/2} in L^q";
inline const char* kCriterionWeightedFock = "weighted composition: |g(z)| w~(|phi(z)|) e^{-alpha|z|^2/2} in L^q";
inline const char* kCriterionWeightedSup = "weighted composition: |g(z)| w~(|phi(z)|) / v(|z|) in L^infty";
inline const char* kCriterionCarleson = "carleson: integral of w~^q(|z|) dmu(z) finite";

/// V_g^phi : A^omega(C^d) -> F_alpha^q(C^d).
inline Verdict classify_volterra(const WeightFunction& w, const EntireSymbol& g, const SelfMap& phi, double alpha,
                                 double q, int d, const ClassifyOptions& opt = {}) {
  detail::check_q(q);
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (g.dimension() != d || dimension(phi) != d) throw DimensionError("symbol dimensions do not match d");
  if (g.is_constant()) return detail::zero_operator(kCriterionVolterra, q);
  const auto aff = as_affine(phi);
  const auto sw = detail::symbolic_weight(w);
  if (detail::use_symbolic(opt.path, aff && sw)) {
    const double bb = std::abs(aff->beta), gg = aff->gamma_norm();
    const double qq = std::isinf(q) ? 1.0 : q;
    const double a = 0.5 * qq * (sw->alpha * bb * bb - alpha);
    const double b = qq * sw->alpha * bb * gg;
    const double p = g.degree() - 2.0 + sw->power;
    return detail::symbolic_verdict(a, 0.5 * qq * std::max(sw->alpha * bb * bb, alpha), b, qq * sw->alpha * bb * gg,
                                    p, q, d, kCriterionVolterra, opt.symbolic_rel_tol);
  }
  const AssociatedWeight env(w, opt.n_max);
  const EntireSymbol rg = radial_derivative(g);
  if (d == 1) {
    const auto log_p = [&](cplx z) {
      const double r = std::abs(z);
      return detail::safe_log_abs(rg(z)) - 2.0 * std::log1p(r) - 0.5 * alpha * r * r +
             env.log_value(std::abs(apply_map(phi, z)));
    };
    return detail::numeric_profile(log_p, q, kCriterionVolterra, opt.quad);
  }
  if (!aff) throw UnsupportedError("classification in d >= 2 needs an affine map");
  const double bb = std::abs(aff->beta), gg = aff->gamma_norm();
  const auto m = [&](double r) {
    return rg.log_coefficient_bound(r) - 2.0 * std::log1p(r) - 0.5 * alpha * r * r + env.log_value(bb * r + gg);
  };
  return detail::numeric_majorant(m, q, d, kCriterionVolterra, opt.quad);
}

/// C_phi V_g : A^omega(C) -> F_alpha^q(C).
inline Verdict classify_cmpg(const WeightFunction& w, const EntireSymbol& g, const SelfMap& phi, double alpha,
                             double q, const ClassifyOptions& opt = {}) {
  detail::check_q(q);
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (g.dimension() != 1 || dimension(phi) != 1) throw DimensionError("C_phi V_g is defined in one variable");
  const EntireSymbol phis = as_symbol(phi);
  if (g.is_constant() || phis.is_constant()) return detail::zero_operator(kCriterionCmpg, q);
  const auto aff = as_affine(phi);
  const auto sw = detail::symbolic_weight(w);
  if (detail::use_symbolic(opt.path, aff && sw)) {
    const double bb = std::abs(aff->beta), gg = aff->gamma_norm();
    const double qq = std::isinf(q) ? 1.0 : q;
    const double a = 0.5 * qq * (sw->alpha * bb * bb - alpha);
    const double b = qq * sw->alpha * bb * gg;
    const double p = g.degree() - 2.0 + sw->power;
    return detail::symbolic_verdict(a, 0.5 * qq * std::max(sw->alpha * bb * bb, alpha), b, b, p, q, 1, kCriterionCmpg,
                                    opt.symbolic_rel_tol);
  }
  const AssociatedWeight env(w, opt.n_max);
  const EntireSymbol dg = derivative(g), dphi = derivative(phis);
  const auto log_p = [&](cplx z) {
    const double r = std::abs(z);
    const cplx u = phis(z);
    return detail::safe_log_abs(dg(u)) + detail::safe_log_abs(dphi(z)) - std::log1p(r) + env.log_value(std::abs(u)) -
           0.5 * alpha * r * r;
  };
  return detail::numeric_profile(log_p, q, kCriterionCmpg, opt.quad);
}

/// K_g^phi or Ktilde_{phi,g} : F_alpha^infty(C) -> F_alpha^q(C).
inline Verdict classify_companion(OperatorKind kind, const EntireSymbol& g, const SelfMap& phi, double alpha, double q,
                                  const ClassifyOptions& opt = {}) {
  detail::check_q(q);
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (kind != OperatorKind::companion_composed && kind != OperatorKind::companion_outer)
    throw DomainError("classify_companion expects K_g^phi or Ktilde_{phi,g}");
  if (g.dimension() != 1 || dimension(phi) != 1) throw DimensionError("companion operators are one-variable");
  const bool outer = kind == OperatorKind::companion_outer;
  const char* tag = outer ? kCriterionCompanionOuter : kCriterionCompanion;
  const EntireSymbol phis = as_symbol(phi);
  if (g.is_zero() || (outer && phis.is_constant())) return detail::zero_operator(tag, q);
  const auto aff = as_affine(phi);
  if (detail::use_symbolic(opt.path, aff.has_value())) {
    const double bb = std::abs(aff->beta), gg = aff->gamma_norm();
    const double qq = std::isinf(q) ? 1.0 : q;
    const double a = 0.5 * qq * alpha * (bb * bb - 1.0);
    const double b = qq * alpha * bb * gg;
    // (1+|phi|)/(1+|z|) -> |beta| for beta != 0; for beta = 0 the exponent is negative anyway.
    const double p = g.degree();
    return detail::symbolic_verdict(a, 0.5 * qq * alpha * std::max(bb * bb, 1.0), b, b, p, q, 1, tag,
                                    opt.symbolic_rel_tol);
  }
  const EntireSymbol dphi = derivative(phis);
  const auto log_p = [&](cplx z) {
    const double r = std::abs(z);
    const cplx u = phis(z);
    const double s = std::abs(u);
    const double factor = outer ? detail::safe_log_abs(g(u)) + detail::safe_log_abs(dphi(z)) : detail::safe_log_abs(g(z));
    return std::log1p(s) - std::log1p(r) + factor + 0.5 * alpha * (s * s - r * r);
  };
  return detail::numeric_profile(log_p, q, tag, opt.quad);
}

/// Target lattice for weighted composition operators.
struct CompositionTarget {
  enum class Kind { fock, weighted_sup } kind = Kind::fock;
  double alpha = 1.0;  ///< fock: Gaussian exponent
  double q = 2.0;      ///< fock: exponent
  std::optional<WeightFunction> v;  ///< weighted_sup: the weight

  static CompositionTarget fock(double alpha, double q) { return {Kind::fock, alpha, q, std::nullopt}; }
  static CompositionTarget weighted_sup(WeightFunction v) { return {Kind::weighted_sup, 0.0, kInf, std::move(v)}; }
};

/// C_phi^g : A^omega(C^d) -> target.
inline Verdict classify_weighted_comp(const WeightFunction& w, const EntireSymbol& g, const SelfMap& phi,
                                      const CompositionTarget& target, const ClassifyOptions& opt = {}) {
  const bool sup = target.kind == CompositionTarget::Kind::weighted_sup;
  const char* tag = sup ? kCriterionWeightedSup : kCriterionWeightedFock;
  const double q = sup ? kInf : target.q;
  detail::check_q(q);
  if (sup && !target.v) throw DomainError("weighted sup target needs a weight");
  if (!sup && !(target.alpha > 0.0)) throw DomainError("alpha must be positive");
  const int d = g.dimension();
  if (dimension(phi) != d) throw DimensionError("symbol dimensions do not match");
  if (g.is_zero()) return detail::zero_operator(tag, q);
  const auto aff = as_affine(phi);
  const auto sw = detail::symbolic_weight(w);
  std::optional<detail::GaussFamily> vf;
  if (sup) vf = target.v->gauss_family();
  const bool sym_ok = aff && sw && (!sup || vf);
  if (detail::use_symbolic(opt.path, sym_ok)) {
    const double bb = std::abs(aff->beta), gg = aff->gamma_norm();
    const double tgt_alpha = sup ? vf->alpha : target.alpha;
    const double qq = std::isinf(q) ? 1.0 : q;
    const double a = 0.5 * qq * (sw->alpha * bb * bb - tgt_alpha);
    const double b = qq * sw->alpha * bb * gg;
    const double p = g.degree() + sw->power - (sup ? vf->beta : 0.0);
    return detail::symbolic_verdict(a, 0.5 * qq * std::max(sw->alpha * bb * bb, tgt_alpha), b, b, p, q, d, tag,
                                    opt.symbolic_rel_tol);
  }
  const AssociatedWeight env(w, opt.n_max);
  const auto log_target = [&](double r) { return sup ? target.v->log_value(r) : 0.5 * target.alpha * r * r; };
  if (d == 1) {
    const auto log_p = [&](cplx z) {
      const double r = std::abs(z);
      return detail::safe_log_abs(g(z)) + env.log_value(std::abs(apply_map(phi, z))) - log_target(r);
    };
    return detail::numeric_profile(log_p, q, tag, opt.quad);
  }
  if (!aff) throw UnsupportedError("classification in d >= 2 needs an affine map");
  const double bb = std::abs(aff->beta), gg = aff->gamma_norm();
  const auto m = [&](double r) { return g.log_coefficient_bound(r) + env.log_value(bb * r + gg) - log_target(r); };
  return detail::numeric_majorant(m, q, d, tag, opt.quad);
}

/// Dispatch on the operator kind. K_g itself is the case phi = id of K_g^phi.
inline Verdict classify(const OperatorSpec& s, const ClassifyOptions& opt = {}) {
  s.validate();
  switch (s.kind) {
    case OperatorKind::volterra: return classify_volterra(s.source, s.g, s.phi, s.alpha, s.q, s.d, opt);
    case OperatorKind::composition_volterra: return classify_cmpg(s.source, s.g, s.phi, s.alpha, s.q, opt);
    case OperatorKind::companion:
      if (s.d != 1) throw DimensionError("K_g classification is one-variable");
      return classify_companion(OperatorKind::companion_composed, s.g, AffineMap::identity(), s.alpha, s.q, opt);
    case OperatorKind::companion_composed:
    case OperatorKind::companion_outer: return classify_companion(s.kind, s.g, s.phi, s.alpha, s.q, opt);
    case OperatorKind::weighted_composition:
      return classify_weighted_comp(s.source, s.g, s.phi, CompositionTarget::fock(s.alpha, s.q), opt);
  }
  throw UnsupportedError("unknown operator kind");
}

/// A positive measure: finitely many atoms plus an optional radial density
/// d mu = rho(|z|) d lambda, given through log rho.
struct MeasureSpec {
  struct Atom {
    std::vector<cplx> z;
    double mass;
  };
  int dimension = 1;
  std::vector<Atom> atoms;
  std::function<double(double)> log_density;

  void validate() const {
    if (dimension < 1) throw DimensionError("measure dimension must be positive");
    for (const auto& at : atoms) {
      if (!(at.mass > 0.0) || !std::isfinite(at.mass)) throw DomainError("atom masses must be positive");
      if (static_cast<int>(at.z.size()) != dimension) throw DimensionError("atom dimension mismatch");
    }
  }
};

/// q-Carleson test for A^omega(C^d): integral of w~^q(|z|) d mu finite.
inline Verdict carleson_check(const WeightFunction& w, const MeasureSpec& mu, double q,
                              const ClassifyOptions& opt = {}) {
  detail::check_q(q);
  if (std::isinf(q)) throw DomainError("Carleson exponent must be finite");
  mu.validate();
  const AssociatedWeight env(w, opt.n_max);
  Verdict v;
  v.criterion = kCriterionCarleson;
  v.path = Path::numeric;
  v.compact_note = true;
  LogSum atoms;
  for (const auto& at : mu.atoms) {
    double s = 0.0;
    for (const auto& x : at.z) s += std::norm(x);
    atoms.add(std::log(at.mass) + q * env.log_value(std::sqrt(s)));
  }
  v.log_integral = atoms.value();
  v.status = Status::bounded;
  if (!mu.log_density) {
    v.a = v.b = v.kappa = 0.0;
    v.detail = "finite atomic measure";
    return v;
  }
  const int d = mu.dimension;
  const double lr_area = std::log(2.0) + d * std::log(kPi) - std::lgamma(double(d));
  const auto h = [&](double r) {
    const double ld = mu.log_density(r);
    if (std::isnan(ld) || ld == kInf) throw EvaluationError("density is not finite at r=" + std::to_string(r));
    if (ld == kNegInf) return kNegInf;
    return ld + q * env.log_value(r) + (2.0 * d - 1.0) * std::log(r);
  };
  const auto res = integrate_radial(h, opt.quad);
  v = detail::fill_fit(v, res.tail);
  const int decay = tail_integrability(res.tail, opt.quad);
  const bool power_certificate = power_law_tail(res.tail, opt.quad) && std::isfinite(res.tail_log_estimate);
  if (decay > 0) {
    v.status = Status::unbounded;
    v.log_integral = kInf;
    v.detail = "divergent tail";
  } else if (res.converged || power_certificate || (res.tail.vanishing && res.log_value == kNegInf)) {
    const double dens = res.log_value == kNegInf
                            ? kNegInf
                            : lr_area + (res.converged ? res.log_value : log_add_exp(res.log_value, res.tail_log_estimate));
    v.log_integral = log_add_exp(atoms.value(), dens);
    v.detail = res.converged ? "quadrature converged" : "power-law tail beyond the cap";
  } else {
    v.status = Status::inconclusive;
    v.log_integral = kNaN;
    v.detail = "tail inside the decision band";
  }
  return v;
}

struct BerezinReduction {
  double log_numeric;
  double log_closed_form;
  double abs_log_error() const { return std::abs(log_numeric - log_closed_form); }
};

/// log int_C |k_{w,alpha}(u)|^q d lambda(w), by polar quadrature in w about
/// the origin, against log(2 pi/(q alpha)) + q alpha |u|^2 / 2.
inline BerezinReduction berezin_reduce(cplx u, double alpha, double q, const QuadratureOptions& o = {}) {
  if (!(alpha > 0.0) || !(q > 0.0) || std::isinf(q)) throw DomainError("berezin reduction needs alpha > 0, 0 < q < inf");
  const double s = std::abs(u), t0 = std::arg(u);
  const auto h = [&](double r, double t) { return q * alpha * (r * s * std::cos(t - t0) - 0.5 * r * r); };
  const auto res = integrate_polar(h, o);
  if (!res.converged) throw NumericError("berezin quadrature did not converge", res.log_value, res.log_value);
  return {res.log_value, std::log(2.0 * kPi / (q * alpha)) + 0.5 * q * alpha * s * s};
}

/// Max over the z-grid of |log(inner w-integral x remaining z-profile) -
/// log((2 pi/(q alpha)) x single-integral profile)|, for V_g^phi (g' at z) or
/// C_phi V_g (g' at phi(z) times phi').
inline double berezin_equivalence_check(const EntireSymbol& g, const SelfMap& phi, double alpha, double q,
                                        const std::vector<cplx>& z_grid,
                                        OperatorKind kind = OperatorKind::volterra, const QuadratureOptions& o = {}) {
  if (kind != OperatorKind::volterra && kind != OperatorKind::composition_volterra)
    throw DomainError("berezin equivalence covers V_g^phi and C_phi V_g");
  if (g.dimension() != 1) throw DimensionError("berezin equivalence is one-variable");
  const EntireSymbol dg = derivative(g), phis = as_symbol(phi), dphi = derivative(phis);
  double worst = 0.0;
  for (const cplx z : z_grid) {
    const double r = std::abs(z);
    const cplx u = phis(z);
    const double lg = kind == OperatorKind::volterra ? detail::safe_log_abs(dg(z))
                                                     : detail::safe_log_abs(dg(u)) + detail::safe_log_abs(dphi(z));
    if (lg == kNegInf) continue;
    const double rest = q * (lg - std::log1p(r) - 0.5 * alpha * r * r);
    const BerezinReduction br = berezin_reduce(u, alpha, q, o);
    const double lhs = br.log_numeric + rest;
    const double rhs = std::log(2.0 * kPi / (q * alpha)) +
                       q * (lg - std::log1p(r) + 0.5 * alpha * (std::norm(u) - r * r));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace fockop
