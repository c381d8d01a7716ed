#pragma once

// Empirical lower bounds for operator norms from unit-norm test functions,
// and parameter sweeps that pair them with classify verdicts.

#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fockop/classify.hpp"
#include "fockop/errors.hpp"
#include "fockop/operators.hpp"
#include "fockop/symbols.hpp"
#include "fockop/weights.hpp"

namespace fockop {

enum class TestFamily { automatic, kernel, frame };

struct VerifyOptions {
  TestFamily family = TestFamily::automatic;
  NormMethod norm = NormMethod::direct;
  int max_degree = 512;
  QuadratureOptions quad{};
};

struct LowerBoundPoint {
  cplx w;
  double log_value = kNaN;  ///< log ||T f_w||_target; -inf for T f_w = 0
  int degree = 0;           ///< degree of the test polynomial
  bool skipped = false;
  std::string note;
};

/// {0, 1, 2, 3, 4} on the positive axis and four seeded random phases at |w| = 3.
inline std::vector<cplx> default_w_grid(std::uint64_t seed = 0x5eed'f0c5ULL) {
  std::vector<cplx> g{0.0, 1.0, 2.0, 3.0, 4.0};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 4; ++i) {
    const double t = 2.0 * kPi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    g.push_back(std::polar(3.0, t));
  }
  return g;
}

namespace detail {

inline TestFamily resolve_family(TestFamily f, const WeightFunction& source) {
  if (f != TestFamily::automatic) return f;
  return std::holds_alternative<Gaussian>(source.kind()) ? TestFamily::kernel : TestFamily::frame;
}

inline double target_norm(const EntireSymbol& f, double alpha, double q, const VerifyOptions& o) {
  if (f.is_zero()) return kNegInf;
  return fock_norm(f, alpha, q, 1, o.norm, o.quad);
}

}  // namespace detail

/// log ||T f_w||_{F_alpha^q} for unit-norm test functions f_w of the source
/// space: normalized kernels k_{w, alpha_s} (Gaussian source) truncated at
/// degree ceil(alpha_s |w|^2 + 8 sqrt(alpha_s) |w| + 16), or the monomial
/// z^n / M_n active at |w| (general source).
inline std::vector<LowerBoundPoint> empirical_lower_bound(const OperatorSpec& spec, const std::vector<cplx>& w_grid,
                                                          const VerifyOptions& opt = {}) {
  spec.validate();
  if (spec.d != 1) throw UnsupportedError("empirical lower bounds are one-variable");
  const TestFamily fam = detail::resolve_family(opt.family, spec.source);
  std::optional<AssociatedWeight> env;
  double alpha_s = 0.0;
  if (fam == TestFamily::kernel) {
    const auto* g = std::get_if<Gaussian>(&spec.source.kind());
    if (!g) throw UnsupportedError("kernel test functions need a gaussian source weight");
    alpha_s = g->alpha;
  } else {
    env.emplace(spec.source, opt.max_degree);
  }
  std::vector<LowerBoundPoint> out;
  out.reserve(w_grid.size());
  for (const cplx w : w_grid) {
    LowerBoundPoint pt;
    pt.w = w;
    EntireSymbol f;
    if (fam == TestFamily::kernel) {
      pt.degree = KernelFunction::truncation_degree(alpha_s, std::abs(w));
      if (pt.degree > opt.max_degree) {
        pt.skipped = true;
        pt.note = "truncation degree " + std::to_string(pt.degree) + " over cap";
        out.push_back(pt);
        continue;
      }
      // The scaled weight c * omega has unit-norm kernels divided by c.
      f = cplx(std::exp(-spec.source.log_scale())) * KernelFunction(w, alpha_s).taylor(pt.degree);
    } else {
      const double lr = std::abs(w) == 0.0 ? kNegInf : std::log(std::abs(w));
      const auto n = env->active_slope(lr);
      pt.degree = static_cast<int>(n);
      f = EntireSymbol::monomial(pt.degree, std::exp(-env->conjugate(n)));
    }
    try {
      pt.log_value = detail::target_norm(apply_operator(spec.kind, spec.g, spec.phi, f), spec.alpha, spec.q, opt);
    } catch (const Error& e) {
      pt.skipped = true;
      pt.note = e.what();
    }
    out.push_back(pt);
  }
  return out;
}

/// Largest increase of the lower bounds from smaller to larger |w|.
inline double lower_bound_growth(const std::vector<LowerBoundPoint>& pts) {
  double growth = kNegInf;
  for (const auto& lo : pts)
    for (const auto& hi : pts) {
      if (lo.skipped || hi.skipped || !(std::abs(hi.w) > std::abs(lo.w))) continue;
      if (!std::isfinite(lo.log_value) || !std::isfinite(hi.log_value)) continue;
      growth = std::max(growth, hi.log_value - lo.log_value);
    }
  return growth;
}

/// max - min over the finite lower bounds.
inline double lower_bound_spread(const std::vector<LowerBoundPoint>& pts) {
  double lo = kInf, hi = kNegInf;
  for (const auto& p : pts)
    if (!p.skipped && std::isfinite(p.log_value)) {
      lo = std::min(lo, p.log_value);
      hi = std::max(hi, p.log_value);
    }
  return hi >= lo ? hi - lo : 0.0;
}

enum class SweepParameter { beta, gamma, q, alpha };

inline std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::beta: return "beta";
    case SweepParameter::gamma: return "gamma";
    case SweepParameter::q: return "q";
    case SweepParameter::alpha: return "alpha";
  }
  return "?";
}

struct SweepPlan {
  OperatorSpec base;
  SweepParameter parameter = SweepParameter::beta;
  std::vector<double> grid;
  std::vector<cplx> w_grid = default_w_grid();
  ClassifyOptions classify{};
  VerifyOptions verify{};
  bool empirical = true;

  void validate() const {
    if (grid.empty()) throw DomainError("sweep grid must be non-empty");
    for (double x : grid)
      if (!std::isfinite(x)) throw DomainError("sweep grid values must be finite");
    if (parameter == SweepParameter::beta || parameter == SweepParameter::gamma)
      if (!as_affine(base.phi)) throw DomainError("beta/gamma sweeps need an affine map");
  }
};

struct SweepRow {
  double parameter = kNaN;
  Verdict verdict;
  double max_lower_bound = kNaN;
  double growth = kNaN;
  std::vector<LowerBoundPoint> lower_bounds;
  std::string error;
  bool consistent = true;  ///< false: bounded verdict with > 20 nats of growth
};

inline constexpr double kConsistencyNats = 20.0;

/// Instance of the template at one parameter value. For beta and gamma the
/// value sets the modulus and the phase of the template is kept.
inline OperatorSpec instantiate(const SweepPlan& plan, double x) {
  OperatorSpec s = plan.base;
  const auto rephase = [](cplx c, double m) { return c == cplx{} ? cplx(m, 0.0) : std::polar(m, std::arg(c)); };
  switch (plan.parameter) {
    case SweepParameter::beta: {
      AffineMap a = *as_affine(s.phi);
      a.beta = rephase(a.beta, x);
      s.phi = a;
      break;
    }
    case SweepParameter::gamma: {
      AffineMap a = *as_affine(s.phi);
      for (auto& c : a.gamma) c = rephase(c, x);
      s.phi = a;
      break;
    }
    case SweepParameter::q: s.q = x; break;
    case SweepParameter::alpha: s.alpha = x; break;
  }
  return s;
}

/// Rows in input order. Failures are recorded per row and the sweep continues.
inline std::vector<SweepRow> sweep(const SweepPlan& plan) {
  plan.validate();
  std::vector<SweepRow> rows;
  rows.reserve(plan.grid.size());
  for (double x : plan.grid) {
    SweepRow row;
    row.parameter = x;
    try {
      const OperatorSpec s = instantiate(plan, x);
      row.verdict = classify(s, plan.classify);
      if (plan.empirical) {
        row.lower_bounds = empirical_lower_bound(s, plan.w_grid, plan.verify);
        double m = kNegInf;
        for (const auto& p : row.lower_bounds)
          if (!p.skipped) m = std::max(m, p.log_value);
        row.max_lower_bound = m;
        row.growth = lower_bound_growth(row.lower_bounds);
        row.consistent = !(row.verdict.status == Status::bounded && row.growth > kConsistencyNats);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
      row.verdict.status = Status::inconclusive;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline bool sweep_consistent(const std::vector<SweepRow>& rows) {
  for (const auto& r : rows)
    if (!r.consistent) return false;
  return true;
}

/// %.12e, with non-finite values spelled nan / inf / -inf.
inline std::string format_float(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "param,status,a,b,kappa,log_integral,max_lower_bound\n";
  for (const auto& r : rows) {
    out += format_float(r.parameter) + "," + to_string(r.verdict.status) + "," + format_float(r.verdict.a) + "," +
           format_float(r.verdict.b) + "," + format_float(r.verdict.kappa) + "," +
           format_float(r.verdict.log_integral) + "," + format_float(r.max_lower_bound) + "\n";
  }
  return out;
}

}  // namespace fockop
