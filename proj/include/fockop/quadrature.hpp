#pragma once

// Integration of non-negative profiles given in log form over [0, inf) and
// over the plane, with log-sum-exp accumulation and a tail-growth fit that
// decides integrability at infinity.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <span>
#include <vector>

#include "fockop/errors.hpp"
#include "fockop/log_math.hpp"

namespace fockop {

struct QuadratureOptions {
  double r_cap = 1e4;        ///< hard truncation radius
  double tail_nats = 80.0;   ///< truncate where the profile is this far below its peak
  double rel_tol = 1e-12;    ///< target relative error of the truncated integral
  int max_panels = 20000;
  double r_min = 1e-6;       ///< lower end of the scan grid
  int scan_points = 1200;
  double fit_r_lo = 20.0;    ///< tail fit window [fit_r_lo, 4 fit_r_lo]
  int fit_points = 1024;
  int theta_nodes = 128;     ///< initial trapezoid nodes for polar integrals
  double theta_tol = 1e-9;
  int theta_max_nodes = 16384;
  // Margins of the decay test applied to the tail fit.
  double a_margin = 1e-6;
  double b_margin = 1e-6;
  double kappa_band = 0.05;
  /// Return without integrating when the tail fit lands inside the decision band.
  bool stop_when_undecided = false;
};

/// Least-squares fit h(r) ~ a r^2 + b r + kappa log r + c, with two
/// nuisance terms c1 / r + c2 / r^2 absorbing corrections such as
/// log(1 + r) - log r.
struct TailFit {
  double a = 0.0;
  double b = 0.0;
  double kappa = 0.0;
  double c = 0.0;
  double residual = 0.0;
  // Standard errors from the residual; roughness of the profile (envelope
  // kinks, angular sampling) shows up here.
  double se_a = 0.0;
  double se_b = 0.0;
  double se_kappa = 0.0;
  bool rank_deficient = false;
  bool vanishing = false;  ///< profile is identically -inf on the window
  bool constant = false;   ///< profile is exactly constant (coefficients exact, design flagged)
};

struct QuadratureResult {
  double log_value = kNegInf;
  double abs_error_estimate = 0.0;  ///< error of log_value from panel estimates
  double truncation_radius = 0.0;
  bool converged = false;
  bool hit_cap = false;             ///< profile still within tail_nats of its peak at r_cap
  TailFit tail;
  double peak_log = kNegInf;
  double peak_radius = 0.0;
  double tail_log_estimate = kNegInf;  ///< log of the estimated mass beyond truncation_radius
  int panels = 0;
};

/// log int_0^inf r^n e^{-c r^2} dr = log Gamma((n+1)/2) - log 2 - ((n+1)/2) log c.
inline double gaussian_moment(double n, double c) {
  if (!(c > 0.0)) throw DomainError("gaussian_moment needs c > 0");
  if (!(n >= 0.0)) throw DomainError("gaussian_moment needs n >= 0");
  const double s = 0.5 * (n + 1.0);
  return std::lgamma(s) - std::log(2.0) - s * std::log(c);
}

inline std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw DomainError("geometric grid needs 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double l = std::log(lo), h = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(l + (h - l) * i / (n - 1));
  g.back() = hi;
  return g;
}

/// Fits h against {r^2, r, log r, 1, 1/r, 1/r^2} on the given grid.
template <class LogProfile>
TailFit tail_slope_fit(LogProfile&& h, std::span<const double> r_grid) {
  constexpr int kBasis = 6;
  TailFit fit;
  const int n = static_cast<int>(r_grid.size());
  std::vector<double> y(n);
  int finite = 0;
  for (int i = 0; i < n; ++i) {
    y[i] = h(r_grid[i]);
    if (std::isnan(y[i]) || y[i] == kInf) throw IntegrandError("non-finite profile in tail fit", r_grid[i]);
    if (y[i] != kNegInf) ++finite;
  }
  if (finite == 0) {
    fit.vanishing = true;
    return fit;
  }
  if (finite < n || n < 16) {
    fit.rank_deficient = true;
    return fit;
  }
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
    fit.c = y[0];
    fit.constant = true;
    fit.rank_deficient = true;
    return fit;
  }
  // Fit in s = r / r0 for conditioning, then map back.
  const double r0 = r_grid[0];
  Eigen::MatrixXd A(n, kBasis);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const double s = r_grid[i] / r0;
    A(i, 0) = s * s;
    A(i, 1) = s;
    A(i, 2) = std::log(s);
    A(i, 3) = 1.0;
    A(i, 4) = 1.0 / s;
    A(i, 5) = 1.0 / (s * s);
    rhs(i) = y[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() < kBasis) {
    fit.rank_deficient = true;
    return fit;
  }
  const Eigen::VectorXd x = qr.solve(rhs);
  fit.a = x(0) / (r0 * r0);
  fit.b = x(1) / r0;
  fit.kappa = x(2);
  fit.c = x(3) - x(2) * std::log(r0);
  const double rss = (A * x - rhs).squaredNorm();
  fit.residual = std::sqrt(rss / n);
  const Eigen::MatrixXd cov = (A.transpose() * A).inverse() * (rss / (n - kBasis));
  fit.se_a = std::sqrt(std::max(cov(0, 0), 0.0)) / (r0 * r0);
  fit.se_b = std::sqrt(std::max(cov(1, 1), 0.0)) / r0;
  fit.se_kappa = std::sqrt(std::max(cov(2, 2), 0.0));
  return fit;
}

/// Margins actually applied to a fit: the configured ones, widened to three
/// standard errors when the profile is rough.
struct EffectiveMargins {
  double a, b, kappa;
};
inline EffectiveMargins effective_margins(const TailFit& f, const QuadratureOptions& o) {
  return {std::max(o.a_margin, 3.0 * f.se_a), std::max(o.b_margin, 3.0 * f.se_b),
          std::max(o.kappa_band, 3.0 * f.se_kappa)};
}

/// Power-law decay certificate: a and b indistinguishable from zero and kappa
/// clearly below the critical power.
inline bool power_law_tail(const TailFit& f, const QuadratureOptions& o, double critical_kappa = -1.0) {
  if (f.vanishing || (f.rank_deficient && !f.constant)) return false;
  const auto m = effective_margins(f, o);
  return std::abs(f.a) <= m.a && std::abs(f.b) <= m.b && f.kappa < critical_kappa - m.kappa;
}

/// Decay classification of a tail fit for an integrand (measure factor
/// already included): +1 divergent, -1 integrable, 0 inside the bands.
inline int tail_integrability(const TailFit& f, const QuadratureOptions& o, double critical_kappa = -1.0) {
  if (f.vanishing) return -1;
  if (f.rank_deficient && !f.constant) return 0;
  const auto m = effective_margins(f, o);
  if (f.a > m.a) return 1;
  if (f.a < -m.a) return -1;
  if (f.b > m.b) return 1;
  if (f.b < -m.b) return -1;
  if (f.kappa > critical_kappa + m.kappa) return 1;
  if (f.kappa < critical_kappa - m.kappa) return -1;
  return 0;
}

namespace detail {

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// Integrates exp(F(r) - shift) over [a, b]; reports the largest exponent seen
// so the caller can re-shift if the scan underestimated the peak.
template <class F>
Panel gk15(F& f, double a, double b, double shift, double& max_exponent) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto eval = [&](double r) {
    const double v = f(r);
    if (std::isnan(v) || v == kInf) throw IntegrandError("non-finite integrand", r);
    max_exponent = std::max(max_exponent, v - shift);
    return std::exp(v - shift);
  };
  const double fc = eval(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = eval(center - dx);
    f2[j] = eval(center + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  resk *= half;
  resg *= half;
  resasc *= std::abs(half);
  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double floor = 50.0 * eps * resabs * std::abs(half);
  if (floor > err) err = floor;
  return {a, b, resk, err};
}

// Shared engine: `integrand` is integrated, `decision` drives truncation and
// the tail fit. They coincide for radial problems; for polar problems the
// decision profile is the angular maximum.
template <class Integrand, class Decision>
QuadratureResult integrate_log_profile(Integrand&& integrand, Decision&& decision, double shift_offset,
                                       const QuadratureOptions& o) {
  QuadratureResult res;
  const auto scan = geometric_grid(o.r_min, o.r_cap, o.scan_points);
  std::vector<double> hv(scan.size());
  double hmax = kNegInf;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    hv[i] = decision(scan[i]);
    if (std::isnan(hv[i]) || hv[i] == kInf) throw IntegrandError("non-finite integrand", scan[i]);
    if (hv[i] > hmax) {
      hmax = hv[i];
      imax = i;
    }
  }
  const auto fit_grid = geometric_grid(o.fit_r_lo, 4.0 * o.fit_r_lo, o.fit_points);
  res.tail = tail_slope_fit(decision, fit_grid);
  if (hmax == kNegInf) {
    res.converged = true;
    res.truncation_radius = 0.0;
    return res;
  }
  const int decay = tail_integrability(res.tail, o);
  if (decay > 0) {
    // Divergence certificate: nothing finite to integrate.
    res.log_value = kInf;
    res.tail_log_estimate = kInf;
    res.peak_log = hmax;
    res.peak_radius = scan[imax];
    res.hit_cap = hv.back() >= hmax - o.tail_nats;
    res.truncation_radius = o.r_cap;
    return res;
  }
  if (decay == 0 && o.stop_when_undecided) {
    res.log_value = kNaN;
    res.tail_log_estimate = kNaN;
    res.peak_log = hmax;
    res.peak_radius = scan[imax];
    res.hit_cap = hv.back() >= hmax - o.tail_nats;
    return res;
  }
  res.peak_log = hmax;
  res.peak_radius = scan[imax];
  std::size_t last = imax;
  for (std::size_t i = imax; i < scan.size(); ++i)
    if (hv[i] >= hmax - o.tail_nats) last = i;
  res.hit_cap = (last + 1 == scan.size());
  const double R = res.hit_cap ? o.r_cap : scan[last + 1];
  res.truncation_radius = R;

  std::vector<double> cuts{0.0, R};
  for (int k = 1; k <= 30; ++k) cuts.push_back(R * std::ldexp(1.0, -k));
  for (int j = 1; j < 32; ++j) cuts.push_back(R * j / 32.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double shift = hmax + shift_offset;
  double total = 0.0, total_err = 0.0;
  std::priority_queue<Panel> heap;
  for (int attempt = 0; attempt < 4; ++attempt) {
    double max_exp = kNegInf;
    heap = {};
    total = total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      Panel p = gk15(integrand, cuts[i], cuts[i + 1], shift, max_exp);
      total += p.value;
      total_err += p.error;
      heap.push(p);
    }
    while (static_cast<int>(heap.size()) < o.max_panels && total_err > o.rel_tol * std::abs(total) &&
           max_exp <= 300.0) {
      Panel p = heap.top();
      heap.pop();
      const double mid = 0.5 * (p.a + p.b);
      if (!(mid > p.a && mid < p.b)) {
        heap.push({p.a, p.b, p.value, 0.0});
        continue;
      }
      Panel l = gk15(integrand, p.a, mid, shift, max_exp);
      Panel r = gk15(integrand, mid, p.b, shift, max_exp);
      total += l.value + r.value - p.value;
      total_err += l.error + r.error - p.error;
      heap.push(l);
      heap.push(r);
    }
    if (max_exp <= 300.0) break;
    shift += max_exp;
  }
  res.panels = static_cast<int>(heap.size());
  if (!(total > 0.0)) {
    res.log_value = kNegInf;
  } else {
    res.log_value = shift + std::log(total);
    res.abs_error_estimate = total_err / total;
  }

  if (res.hit_cap) {
    // Power-law tails beyond the cap: int_R^inf e^{H(R)} (r/R)^kappa dr.
    const double hR = decision(o.r_cap);
    if (power_law_tail(res.tail, o))
      res.tail_log_estimate = hR + std::log(o.r_cap) - std::log(-1.0 - res.tail.kappa);
    else
      res.tail_log_estimate = decay < 0 ? hR + std::log(o.r_cap) : kInf;
  } else {
    res.tail_log_estimate = decision(R) + std::log(std::max(R, 1.0));
  }
  const bool tail_small = res.log_value != kNegInf && res.tail_log_estimate - res.log_value <= std::log(1e-10);
  res.converged = !res.hit_cap && decay < 0 && tail_small;
  return res;
}

}  // namespace detail

/// log int_0^inf e^{h(r)} dr. The caller folds the measure factor into h.
template <class LogIntegrand>
QuadratureResult integrate_radial(LogIntegrand&& h, const QuadratureOptions& o = {}) {
  return detail::integrate_log_profile(h, h, 0.0, o);
}

namespace detail {

// log int_0^{2 pi} e^{h(r, theta)} d theta by the periodic trapezoid rule,
// doubling the node count until consecutive values agree to theta_tol.
template <class PolarLog>
double angular_log_integral(PolarLog& h, double r, const QuadratureOptions& o) {
  int n = o.theta_nodes;
  std::vector<double> vals(n);
  for (int j = 0; j < n; ++j) vals[j] = h(r, 2.0 * kPi * j / n);
  const auto lse = [](const std::vector<double>& v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
  };
  double prev_lse = lse(vals);
  double prev = prev_lse + std::log(2.0 * kPi / n);
  while (n < o.theta_max_nodes) {
    std::vector<double> odd(n);
    for (int j = 0; j < n; ++j) odd[j] = h(r, 2.0 * kPi * (2 * j + 1) / (2 * n));
    const double cur_lse = log_add_exp(prev_lse, lse(odd));
    n *= 2;
    const double cur = cur_lse + std::log(2.0 * kPi / n);
    if (cur == kNegInf && prev == kNegInf) return kNegInf;
    if (std::abs(cur - prev) <= o.theta_tol) return cur;
    prev = cur;
    prev_lse = cur_lse;
  }
  return prev;
}

}  // namespace detail

/// log int_C e^{h(r, theta)} dA, with dA = r dr dtheta folded in here.
template <class PolarLog>
QuadratureResult integrate_polar(PolarLog&& h, const QuadratureOptions& o = {}) {
  const auto integrand = [&](double r) {
    const double a = detail::angular_log_integral(h, r, o);
    return a == kNegInf ? kNegInf : a + std::log(r);
  };
  const auto decision = [&](double r) {
    double m = kNegInf;
    for (int j = 0; j < o.theta_nodes; ++j) m = std::max(m, h(r, 2.0 * kPi * j / o.theta_nodes));
    return m == kNegInf ? kNegInf : m + std::log(r);
  };
  return detail::integrate_log_profile(integrand, decision, std::log(2.0 * kPi), o);
}

}  // namespace fockop
