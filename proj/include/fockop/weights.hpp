#pragma once

// Radial weight functions, their logarithmic transforms, integer-slope
// Legendre conjugates and the monomial envelope that realizes the associated
// weight from below.
//
// A weight omega on [0, inf) is handled through Phi(x) = log omega(e^x). The
// conjugate Phi*(n) = sup_y (n y - Phi(y)) equals log M_n with
// M_n = sup_t t^n / omega(t), so z^n / M_n is the extremal monomial dominated
// by omega and
//
//   log E(e^x) = max_{0 <= n <= n_max} (n x - Phi*(n))
//
// is the largest function of that form. E <= associated weight <= omega.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fockop/errors.hpp"
#include "fockop/log_math.hpp"
#include "fockop/symbols.hpp"

namespace fockop {

/// omega(t) = exp(alpha t^2 / 2)
struct Gaussian {
  double alpha;
};

/// omega(t) = (1 + t)^beta exp(t^2 / 2)
struct FockSobolev {
  double beta;
};

/// omega(t) = (1 + t)^m exp(alpha t^2 / 2)
struct GaussianPoly {
  double alpha;
  int m;
};

/// A weight given through its logarithmic transform. Derivatives are optional;
/// missing ones are replaced by central differences.
struct CustomLogTransform {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> d2phi;
  /// Phi is only required on [x_min, inf); omega is constant below e^{x_min}.
  double x_min = kNegInf;
  /// Upper end of the window used for the construction-time sanity checks.
  double horizon = 30.0;
  std::string name = "custom";
};

namespace detail {

// The three built-in kinds share Phi(x) = beta log(1 + e^x) + (alpha/2) e^{2x}.
struct GaussFamily {
  double alpha;
  double beta;

  double log_weight(double t) const { return beta * std::log1p(t) + 0.5 * alpha * t * t; }
  double phi(double x) const { return beta * log1p_exp(x) + 0.5 * alpha * std::exp(2.0 * x); }
  double dphi(double x) const {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return beta * s + alpha * std::exp(2.0 * x);
  }
  double d2phi(double x) const {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return beta * s * (1.0 - s) + 2.0 * alpha * std::exp(2.0 * x);
  }

  // sup_{t > 0} (n log t - log omega(t)); the stationary point solves
  // alpha t^3 + alpha t^2 + (beta - n) t - n = 0, which has exactly one
  // positive root for n > 0.
  double conjugate(std::int64_t n) const {
    if (n == 0) {
      if (beta >= 0.0) return 0.0;
      const double t0 = 0.5 * (-1.0 + std::sqrt(1.0 - 4.0 * beta / alpha));
      return -log_weight(t0);
    }
    const double nn = static_cast<double>(n);
    if (beta == 0.0) return 0.5 * nn * std::log(nn / alpha) - 0.5 * nn;
    const auto p = [&](double t) { return ((alpha * t + alpha) * t + (beta - nn)) * t - nn; };
    const auto dp = [&](double t) { return (3.0 * alpha * t + 2.0 * alpha) * t + (beta - nn); };
    double lo = 0.0;
    double hi = std::max(1.0, std::sqrt(nn / alpha));
    while (p(hi) <= 0.0) hi *= 2.0;
    double t = std::clamp(std::sqrt(nn / alpha), lo, hi);
    for (int it = 0; it < 200; ++it) {
      const double pt = p(t);
      if (pt < 0.0) lo = t; else hi = t;
      const double d = dp(t);
      double next = d > 0.0 ? t - pt / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 1e-16 * t || hi - lo <= 1e-16 * hi) {
        t = next;
        break;
      }
      t = next;
    }
    return nn * std::log(t) - log_weight(t);
  }
};

}  // namespace detail

class WeightFunction {
 public:
  using Kind = std::variant<Gaussian, FockSobolev, GaussianPoly, CustomLogTransform>;

  static WeightFunction gaussian(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    return WeightFunction(Gaussian{alpha});
  }

  /// Accepts any real beta. For beta < 0 the weight dips below 1 near the
  /// origin and is only eventually non-decreasing; it is equivalent to a
  /// monotone weight and defines the same growth space.
  static WeightFunction fock_sobolev(double beta) {
    if (!std::isfinite(beta)) throw DomainError("beta must be finite");
    return WeightFunction(FockSobolev{beta});
  }

  static WeightFunction gaussian_poly(double alpha, int m) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    if (m < 0) throw DomainError("m must be a non-negative integer");
    return WeightFunction(GaussianPoly{alpha, m});
  }

  /// Custom weights are validated by sampling Phi on [max(x_min, -10), horizon]:
  /// finite, non-decreasing and with increasing secant slopes (growth faster
  /// than any fixed power within the window).
  static WeightFunction custom(CustomLogTransform c) {
    if (!c.phi) throw DomainError("custom weight needs a log-transform");
    WeightFunction w(std::move(c));
    w.validate_custom();
    return w;
  }

  const Kind& kind() const noexcept { return kind_; }
  bool is_custom() const noexcept { return std::holds_alternative<CustomLogTransform>(kind_); }
  bool has_analytic_derivatives() const {
    if (const auto* c = std::get_if<CustomLogTransform>(&kind_)) return c->dphi && c->d2phi;
    return true;
  }

  /// Returns c * omega.
  WeightFunction scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw DomainError("scale factor must be positive");
    WeightFunction w = *this;
    w.log_scale_ += std::log(factor);
    return w;
  }
  double log_scale() const noexcept { return log_scale_; }

  /// (alpha, power) for the Gaussian family; nullopt for custom weights.
  std::optional<detail::GaussFamily> gauss_family() const {
    return std::visit(
        [](const auto& k) -> std::optional<detail::GaussFamily> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Gaussian>) return detail::GaussFamily{k.alpha, 0.0};
          else if constexpr (std::is_same_v<K, FockSobolev>) return detail::GaussFamily{1.0, k.beta};
          else if constexpr (std::is_same_v<K, GaussianPoly>) return detail::GaussFamily{k.alpha, double(k.m)};
          else return std::nullopt;
        },
        kind_);
  }

  /// Phi(x) = log omega(e^x).
  double log_transform(double x) const {
    if (auto f = gauss_family()) return f->phi(x) + log_scale_;
    const auto& c = std::get<CustomLogTransform>(kind_);
    const double v = c.phi(std::max(x, custom_floor(c))) + log_scale_;
    if (!std::isfinite(v)) throw EvaluationError("custom log-transform is not finite at x=" + std::to_string(x));
    return v;
  }

  double log_transform_d1(double x) const {
    if (auto f = gauss_family()) return f->dphi(x);
    const auto& c = std::get<CustomLogTransform>(kind_);
    if (x < c.x_min) return 0.0;
    if (c.dphi) return checked(c.dphi(x), x);
    constexpr double h = 1e-4;
    return checked((c.phi(x + h) - c.phi(std::max(x - h, c.x_min))) / (x + h - std::max(x - h, c.x_min)), x);
  }

  /// Phi''; central differences with step 1e-4 for custom weights without d2phi.
  double log_transform_d2(double x) const {
    if (auto f = gauss_family()) return f->d2phi(x);
    const auto& c = std::get<CustomLogTransform>(kind_);
    if (c.d2phi) return checked(c.d2phi(x), x);
    constexpr double h = 1e-4;
    const double v = (log_transform(x + h) - 2.0 * log_transform(x) + log_transform(x - h)) / (h * h);
    return checked(v, x);
  }

  /// log omega(t), t >= 0.
  double log_value(double t) const {
    if (t < 0.0) throw DomainError("weight evaluated at negative radius");
    if (auto f = gauss_family()) return f->log_weight(t) + log_scale_;
    if (t == 0.0) return log_transform(kNegInf);
    return log_transform(std::log(t));
  }

  double value(double t) const { return std::exp(log_value(t)); }

  /// Phi*(n) = sup_y (n y - Phi(y)); closed form or a cubic root for the
  /// built-ins, golden-section search on the concave objective otherwise.
  double legendre_conjugate(std::int64_t n) const {
    if (n < 0) throw DomainError("conjugate slope must be non-negative");
    if (auto f = gauss_family()) return f->conjugate(n) - log_scale_;
    return custom_conjugate(n);
  }

  /// Grammar form, e.g. "gaussian:alpha=1".
  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Gaussian>) os << "gaussian:alpha=" << k.alpha;
          else if constexpr (std::is_same_v<K, FockSobolev>) os << "fock_sobolev:beta=" << k.beta;
          else if constexpr (std::is_same_v<K, GaussianPoly>) os << "gaussian_poly:alpha=" << k.alpha << ",m=" << k.m;
          else os << k.name;
        },
        kind_);
    if (log_scale_ != 0.0) os << "*" << std::exp(log_scale_);
    return os.str();
  }

 private:
  explicit WeightFunction(Kind k) : kind_(std::move(k)) {}

  static double custom_floor(const CustomLogTransform& c) { return std::isfinite(c.x_min) ? c.x_min : -60.0; }

  static double checked(double v, double x) {
    if (!std::isfinite(v)) throw EvaluationError("custom log-transform derivative is not finite at x=" + std::to_string(x));
    return v;
  }

  void validate_custom() const {
    const auto& c = std::get<CustomLogTransform>(kind_);
    const double lo = std::max(custom_floor(c), -10.0);
    const double hi = c.horizon;
    if (!(hi > lo)) throw DomainError("custom weight horizon must exceed its domain start");
    constexpr int kSamples = 400;
    std::vector<double> xs(kSamples), ys(kSamples);
    for (int i = 0; i < kSamples; ++i) {
      xs[i] = lo + (hi - lo) * i / (kSamples - 1);
      ys[i] = log_transform(xs[i]);
      if (i > 0 && ys[i] < ys[i - 1] - 1e-12 * (1.0 + std::abs(ys[i - 1])))
        throw DomainError("custom weight is not non-decreasing near x=" + std::to_string(xs[i]));
    }
    const int q = kSamples / 4;
    const double first = (ys[q] - ys[0]) / (xs[q] - xs[0]);
    const double last = (ys[kSamples - 1] - ys[kSamples - 1 - q]) / (xs[kSamples - 1] - xs[kSamples - 1 - q]);
    if (!(last > first) || !(last > 0.0))
      throw DomainError("custom weight does not grow faster than a power on its window");
  }

  double custom_conjugate(std::int64_t n) const {
    const auto& c = std::get<CustomLogTransform>(kind_);
    const double floor_x = custom_floor(c);
    if (n == 0) return -log_transform(floor_x);
    const double nn = static_cast<double>(n);
    const auto g = [&](double y) { return nn * y - log_transform(y); };
    // Bracket the maximizer of the concave objective by galloping.
    double y = std::max(0.0, floor_x);
    double step = 1.0;
    double lo, hi;
    if (g(y + step) > g(y)) {
      double prev = y;
      while (true) {
        const double next = y + step;
        if (next > 700.0) throw NumericError("conjugate bracket search diverged", prev, next);
        if (g(next) <= g(y)) {
          lo = prev;
          hi = next;
          break;
        }
        prev = y;
        y = next;
        step *= 2.0;
      }
    } else {
      double prev = y + step;
      while (true) {
        const double next = std::max(y - step, floor_x);
        if (next == y || g(next) <= g(y)) {
          lo = next;
          hi = prev;
          break;
        }
        prev = y;
        y = next;
        step *= 2.0;
        if (y < -745.0) throw NumericError("conjugate bracket search diverged", y, prev);
      }
    }
    double a = lo, b = hi;
    constexpr double invphi = 0.6180339887498948482;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 400; ++it) {
      const double best = std::max(f1, f2);
      if (b - a <= 1e-12 * std::max(1.0, std::abs(0.5 * (a + b)))) {
        return std::max({best, g(a), g(b)});
      }
      if (f1 >= f2) {
        b = x2; x2 = x1; f2 = f1;
        x1 = b - invphi * (b - a); f1 = g(x1);
      } else {
        a = x1; x1 = x2; f1 = f2;
        x2 = a + invphi * (b - a); f2 = g(x2);
      }
    }
    throw NumericError("conjugate search did not converge", a, b);
  }

  Kind kind_;
  double log_scale_ = 0.0;
};

/// The monomial envelope E(r) = max_{0 <= n <= n_max} r^n / M_n.
///
/// Conjugates for slopes up to kTableSize are precomputed; larger slopes are
/// evaluated on demand, so n_max may be very large. The maximizing slope is
/// located by galloping from the continuous optimum Phi'(x), which is exact
/// because n -> n x - Phi*(n) is concave.
class AssociatedWeight {
 public:
  static constexpr std::int64_t kTableSize = 4096;

  AssociatedWeight(WeightFunction source, std::int64_t n_max) : source_(std::move(source)), n_max_(n_max) {
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    const std::int64_t count = std::min(n_max, kTableSize - 1) + 1;
    table_.reserve(count);
    for (std::int64_t n = 0; n < count; ++n) table_.push_back(source_.legendre_conjugate(n));
  }

  const WeightFunction& source() const noexcept { return source_; }
  std::int64_t n_max() const noexcept { return n_max_; }

  double conjugate(std::int64_t n) const {
    if (n < static_cast<std::int64_t>(table_.size())) return table_[n];
    return source_.legendre_conjugate(n);
  }

  /// Conjugate values for the tabulated slopes 0..min(n_max, kTableSize-1).
  const std::vector<double>& conjugate_table() const noexcept { return table_; }

  /// The slope n attaining the envelope at log-radius x.
  std::int64_t active_slope(double x) const {
    if (x == kNegInf || n_max_ == 0) return 0;
    const auto val = [&](std::int64_t n) { return static_cast<double>(n) * x - conjugate(n); };
    std::int64_t start = 0;
    if (!source_.is_custom() || source_.has_analytic_derivatives()) {
      const double guess = source_.log_transform_d1(x);
      if (std::isfinite(guess) && guess > 0.0)
        start = guess >= static_cast<double>(n_max_) ? n_max_ : std::llround(guess);
    }
    start = std::clamp<std::int64_t>(start, 0, n_max_);
    const double v0 = val(start);
    int dir = 0;
    if (start < n_max_ && val(start + 1) > v0) dir = 1;
    else if (start > 0 && val(start - 1) > v0) dir = -1;
    if (dir == 0) return start;
    // Gallop in the ascending direction, then bisect on the sign of the
    // forward difference.
    std::int64_t lo = start;
    std::int64_t step = 1;
    std::int64_t hi;
    while (true) {
      const std::int64_t next = std::clamp<std::int64_t>(lo + dir * step, 0, n_max_);
      if (next == lo) { hi = lo; break; }
      const bool still_rising = dir > 0 ? (next < n_max_ && val(next + 1) > val(next))
                                        : (next > 0 && val(next - 1) > val(next));
      if (!still_rising) { hi = next; break; }
      lo = next;
      step *= 2;
    }
    std::int64_t a = std::min(lo, hi);
    std::int64_t b = std::max(lo, hi);
    // Invariant: the maximizer lies in [a, b].
    while (b - a > 1) {
      const std::int64_t mid = a + (b - a) / 2;
      if (val(mid + 1) > val(mid)) a = mid + 1; else b = mid;
    }
    return val(b) > val(a) ? b : a;
  }

  /// log E(e^x).
  double log_value_at_log_radius(double x) const {
    if (x == kNegInf) return -conjugate(0);
    const std::int64_t n = active_slope(x);
    return static_cast<double>(n) * x - conjugate(n);
  }

  /// log E(r).
  double log_value(double r) const {
    if (r < 0.0) throw DomainError("envelope evaluated at negative radius");
    return log_value_at_log_radius(r == 0.0 ? kNegInf : std::log(r));
  }

  double value(double r) const { return std::exp(log_value(r)); }

  /// The envelope as a custom weight in its own right, with log E(e^x) as Phi.
  WeightFunction as_weight(double horizon) const {
    auto self = std::make_shared<AssociatedWeight>(*this);
    CustomLogTransform c;
    c.phi = [self](double x) { return self->log_value_at_log_radius(x); };
    c.horizon = horizon;
    c.name = "envelope(" + source_.describe() + ")";
    return WeightFunction::custom(std::move(c));
  }

 private:
  WeightFunction source_;
  std::int64_t n_max_;
  std::vector<double> table_;
};

inline double log_transform(const WeightFunction& w, double x) { return w.log_transform(x); }
inline double legendre_conjugate(const WeightFunction& w, std::int64_t n) { return w.legendre_conjugate(n); }

inline AssociatedWeight monomial_envelope(const WeightFunction& w, std::int64_t n_max) {
  return AssociatedWeight(w, n_max);
}

enum class Essentiality { essential_certified, inconclusive };

struct EssentialityReport {
  Essentiality status = Essentiality::inconclusive;
  double x_start = 0.0;
  double x_end = 0.0;
  int samples = 0;
  double min_second_derivative = kNaN;
  bool tail_non_decreasing = false;
  static constexpr double kMargin = 1e-3;
};

/// Certifies essentiality on a finite window via a positive lower bound on
/// Phi'' together with a non-decreasing Phi'' over the last tenth of the
/// samples. Never concludes non-essentiality.
inline EssentialityReport essentiality_test(const WeightFunction& w, double x_start = 0.0, double x_end = 30.0,
                                            int samples = 1000) {
  if (!(x_end > x_start)) throw DomainError("essentiality window must have x_end > x_start");
  if (samples < 10) throw DomainError("essentiality test needs at least 10 samples");
  EssentialityReport rep;
  rep.x_start = x_start;
  rep.x_end = x_end;
  rep.samples = samples;
  std::vector<double> d2(samples);
  std::vector<double> noise(samples, 0.0);
  const bool analytic = w.has_analytic_derivatives();
  for (int i = 0; i < samples; ++i) {
    const double x = x_start + (x_end - x_start) * i / (samples - 1);
    d2[i] = w.log_transform_d2(x);
    if (!std::isfinite(d2[i])) throw EvaluationError("second derivative of log-transform is not finite");
    // Roundoff level of the central difference stencil.
    noise[i] = analytic ? 1e-12 * std::abs(d2[i])
                        : 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w.log_transform(x))) / 1e-8;
  }
  rep.min_second_derivative = *std::min_element(d2.begin(), d2.end());
  const int tail = std::max(2, samples / 10);
  bool ok = true;
  for (int i = samples - tail + 1; i < samples; ++i)
    if (d2[i] < d2[i - 1] - noise[i]) ok = false;
  if (d2[samples - 1] < d2[samples - tail] - noise[samples - 1]) ok = false;
  rep.tail_non_decreasing = ok;
  rep.status = (rep.min_second_derivative > EssentialityReport::kMargin && ok) ? Essentiality::essential_certified
                                                                              : Essentiality::inconclusive;
  return rep;
}

struct FrameMember {
  std::int64_t slope;  ///< n in z^n / M_n
  double log_coefficient;  ///< -Phi*(n) = log(1 / M_n)
  EntireSymbol symbol() const { return EntireSymbol::monomial(static_cast<int>(slope), std::exp(log_coefficient)); }
};

struct FrameReport {
  std::vector<FrameMember> members;
  double delta_achieved = kNaN;     ///< min over the grid of sum|f_n| / omega
  double min_envelope_ratio = kNaN; ///< min over the grid of sum|f_n| / E
  double radius = 0.0;
  int grid_points = 0;
};

/// Finite-radius frame: the monomials z^n / M_n active on [0, R], certified
/// on r = 0 and a 1000-point log-spaced grid over [1e-6 R, R].
inline FrameReport entire_frame(const WeightFunction& w, double R, double delta, std::int64_t n_max,
                                bool require_certified = true) {
  if (!(R > 0.0)) throw DomainError("frame radius must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (require_certified && essentiality_test(w).status != Essentiality::essential_certified)
    throw FrameError("weight is not certified essential", 0.0);
  const AssociatedWeight env(w, n_max);
  constexpr int kGrid = 1000;
  std::vector<double> grid{0.0};
  for (int i = 0; i < kGrid; ++i) grid.push_back(R * std::pow(10.0, -6.0 + 6.0 * i / (kGrid - 1)));
  std::vector<std::int64_t> active;
  for (double r : grid) active.push_back(env.active_slope(r == 0.0 ? kNegInf : std::log(r)));
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  FrameReport rep;
  rep.radius = R;
  rep.grid_points = static_cast<int>(grid.size());
  for (auto n : active) rep.members.push_back({n, -env.conjugate(n)});
  double min_w = kInf, min_e = kInf;
  for (double r : grid) {
    LogSum s;
    const double lr = r == 0.0 ? kNegInf : std::log(r);
    for (const auto& m : rep.members) s.add(m.slope == 0 ? m.log_coefficient : m.slope * lr + m.log_coefficient);
    min_w = std::min(min_w, s.value() - w.log_value(r));
    min_e = std::min(min_e, s.value() - env.log_value(r));
  }
  rep.delta_achieved = std::exp(min_w);
  rep.min_envelope_ratio = std::exp(min_e);
  if (rep.delta_achieved < delta) throw FrameError("frame does not reach the requested delta", rep.delta_achieved);
  return rep;
}

}  // namespace fockop
