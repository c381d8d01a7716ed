#include <gtest/gtest.h>

#include <random>

#include "fockop/operators.hpp"
#include "oracles.hpp"

using namespace fockop;

namespace {

EntireSymbol poly(std::vector<cplx> c) { return EntireSymbol(std::move(c)); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

// int_0^1 f(phi(tz)) Rg(tz) dt / t with Rg(tz) / t = z g'(tz).
cplx volterra_by_quadrature(const EntireSymbol& g, const AffineMap& phi, const EntireSymbol& f, cplx z) {
  const auto dg = derivative(g);
  return oracle::segment_integral([&](double t) { return f(phi(t * z)) * z * dg(t * z); });
}

double log_closed_monomial(int n, double alpha, double p) {
  return (0.5 * n * p * std::log(2.0 / (alpha * p)) + std::lgamma(0.5 * n * p + 1.0)) / p;
}

}  // namespace

TEST(VolterraEval, Examples) {
  const auto id = AffineMap::identity();
  for (cplx z : {cplx(0.3, -1.0), cplx(2.0), cplx(-4.0, 0.5)})
    EXPECT_LT(std::abs(volterra_eval(EntireSymbol::monomial(1), id, EntireSymbol::constant(1.0), z) - z), 1e-14);
  EXPECT_NEAR(std::abs(volterra_eval(EntireSymbol::monomial(2), id, EntireSymbol::monomial(1), 1.0) - 2.0 / 3.0), 0.0,
              1e-15);
  EXPECT_EQ(volterra_eval(EntireSymbol::constant(3.0), AffineMap(0.4, 1.0), EntireSymbol::monomial(4), cplx(1, 1)),
            cplx(0.0));
}

TEST(VolterraEval, AgreesWithSegmentQuadrature) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 10; ++t) {
    const auto g = poly(oracle::random_coeffs(rng, 1 + t % 4));
    const auto f = poly(oracle::random_coeffs(rng, t % 5));
    const AffineMap phi(cplx(n01(rng), n01(rng)), cplx(n01(rng), n01(rng)));
    const cplx z(n01(rng), n01(rng));
    EXPECT_LT(rel(volterra_eval(g, phi, f, z), volterra_by_quadrature(g, phi, f, z)), 1e-10);
  }
}

TEST(VolterraEval, TwoVariables) {
  // g = z1 z2, phi = id: V f for f = 1 is int_0^1 2 t^2 z1 z2 dt / t = z1 z2.
  const EntireSymbol g(2, {{{1, 1}, 1.0}});
  const std::vector<cplx> z{cplx(1.5, 0.5), cplx(-0.7, 2.0)};
  const cplx v = volterra_eval(g, AffineMap::identity(2), EntireSymbol::constant(1.0, 2), z);
  EXPECT_LT(std::abs(v - z[0] * z[1]), 1e-14);
}

TEST(CompanionEval, Examples) {
  const auto id = AffineMap::identity();
  EXPECT_LT(std::abs(companion_eval(OperatorKind::companion, EntireSymbol::constant(1.0), id, EntireSymbol::monomial(2),
                                    2.0) - 4.0), 1e-14);
  EXPECT_LT(std::abs(companion_eval(OperatorKind::composition_volterra, EntireSymbol::monomial(1),
                                    AffineMap(2.0, 0.0), EntireSymbol::constant(1.0), 1.0) - 2.0), 1e-14);
  EXPECT_EQ(companion_eval(OperatorKind::companion_outer, EntireSymbol::monomial(3), AffineMap(0.5, 1.0),
                           EntireSymbol::constant(7.0), cplx(1, 2)),
            cplx(0.0));
  EXPECT_THROW(companion_eval(OperatorKind::volterra, EntireSymbol::monomial(1), id, EntireSymbol::monomial(1), 1.0),
               DomainError);
}

TEST(CompanionEval, AgreesWithSegmentQuadrature) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 8; ++t) {
    const auto g = poly(oracle::random_coeffs(rng, 1 + t % 3));
    const auto f = poly(oracle::random_coeffs(rng, 1 + t % 4));
    const AffineMap phi(cplx(n01(rng), n01(rng)), cplx(n01(rng), n01(rng)));
    const cplx z(n01(rng), n01(rng));
    const auto df = derivative(f), dg = derivative(g);
    const cplx w = phi(z);
    // K_g^phi f (z) = int_0^z f'(phi(xi)) g(xi) d xi.
    const cplx kgp = oracle::segment_integral([&](double s) { return df(phi(s * z)) * g(s * z) * z; });
    EXPECT_LT(rel(companion_eval(OperatorKind::companion_composed, g, phi, f, z), kgp), 1e-10);
    // Ktilde f (z) = int_0^{phi(z)} f'(xi) g(xi) d xi.
    const cplx kt = oracle::segment_integral([&](double s) { return df(s * w) * g(s * w) * w; });
    EXPECT_LT(rel(companion_eval(OperatorKind::companion_outer, g, phi, f, z), kt), 1e-10);
    // C_phi V_g f (z) = int_0^{phi(z)} f(xi) g'(xi) d xi.
    const cplx cv = oracle::segment_integral([&](double s) { return f(s * w) * dg(s * w) * w; });
    EXPECT_LT(rel(companion_eval(OperatorKind::composition_volterra, g, phi, f, z), cv), 1e-10);
  }
}

TEST(Property, OperatorsAreLinear) {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> n01;
  const OperatorKind kinds[] = {OperatorKind::volterra, OperatorKind::composition_volterra, OperatorKind::companion,
                                OperatorKind::companion_composed, OperatorKind::companion_outer,
                                OperatorKind::weighted_composition};
  for (auto k : kinds)
    for (int t = 0; t < 10; ++t) {
      const auto g = poly(oracle::random_coeffs(rng, 2));
      const auto f1 = poly(oracle::random_coeffs(rng, 4));
      const auto f2 = poly(oracle::random_coeffs(rng, 6));
      const cplx a(n01(rng), n01(rng)), b(n01(rng), n01(rng)), z(n01(rng), n01(rng));
      const AffineMap phi(cplx(n01(rng), n01(rng)), cplx(n01(rng), n01(rng)));
      const cplx lhs = apply_operator(k, g, phi, a * f1 + b * f2)(z);
      const cplx rhs = a * apply_operator(k, g, phi, f1)(z) + b * apply_operator(k, g, phi, f2)(z);
      EXPECT_LT(rel(lhs, rhs), 1e-12) << to_string(k);
    }
}

TEST(FockNorm, Examples) {
  for (double a : {0.5, 1.0, 3.0})
    for (double p : {1.0, 2.0, 4.5}) EXPECT_NEAR(fock_norm(EntireSymbol::constant(1.0), a, p, 1, NormMethod::direct), 0.0, 1e-12);
  for (int n : {1, 2, 7})
    for (double p : {1.0, 2.0, 3.0})
      EXPECT_NEAR(fock_norm(EntireSymbol::monomial(n), 1.0, p, 1, NormMethod::direct), log_closed_monomial(n, 1.0, p),
                  1e-10);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(fock_norm(EntireSymbol::monomial(2), 1.0, inf, 1, NormMethod::direct), std::log(2.0 / std::exp(1.0)),
              1e-10);
}

TEST(FockNorm, QuadratureMatchesCoefficientFormula) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 6; ++t) {
    const auto f = poly(oracle::random_coeffs(rng, 2 + 3 * t));
    const double a = 0.5 + 0.5 * t;
    EXPECT_NEAR(fock_norm_by_quadrature(f, a, 2.0), fock_norm(f, a, 2.0, 1, NormMethod::direct), 1e-9);
  }
}

TEST(FockNorm, PolarAgreesWithPlaneGrid) {
  const auto f = poly({1.0, cplx(0, 2), -0.5, cplx(0.3, 0.1)});
  const double a = 1.0, p = 1.0;
  const double ref = oracle::plane_log(
      [&](double x, double y) {
        const cplx z(x, y);
        return p * std::log(std::abs(f(z))) - 0.5 * a * p * std::norm(z);
      },
      9.0, 1500);
  EXPECT_NEAR(fock_norm_by_quadrature(f, a, p), (std::log(a * p / (2 * oracle::pi)) + ref) / p, 1e-6);
}

TEST(FockNorm, MultiVariableMonomial) {
  // Product of one-variable norms for z1^2 z2^3.
  const EntireSymbol f(2, {{{2, 3}, 1.0}});
  for (double p : {1.0, 2.0})
    EXPECT_NEAR(fock_norm(f, 1.0, p, 2, NormMethod::direct), log_closed_monomial(2, 1.0, p) + log_closed_monomial(3, 1.0, p),
                1e-9);
}

TEST(Property, NormEquivalence) {
  const double inf = std::numeric_limits<double>::infinity();
  for (double a : {0.5, 1.0, 2.0})
    for (double p : {1.0, 2.0, inf}) {
      std::vector<EntireSymbol> fs;
      for (int n : {0, 1, 2, 5, 10}) fs.push_back(EntireSymbol::monomial(n));
      for (double w : {0.5, 1.5}) fs.push_back(KernelFunction(w, a).taylor(KernelFunction::truncation_degree(a, w)));
      double lo = inf, hi = -inf;
      for (const auto& f : fs) {
        const double r = fock_norm(f, a, p, 1, NormMethod::derivative) - fock_norm(f, a, p, 1, NormMethod::direct);
        ASSERT_TRUE(std::isfinite(r));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      EXPECT_LE(hi - lo, std::log(100.0)) << a << " " << p;
    }
}

TEST(Kernel, Examples) {
  const auto k0 = kernel_function(0.0, 1.3);
  for (cplx z : {cplx(0.0), cplx(2, -1), cplx(-5.0)}) EXPECT_LT(std::abs(k0(z) - 1.0), 1e-15);
  EXPECT_NEAR(std::abs(kernel_function(2.0, 1.0)(2.0)), std::exp(2.0), 1e-12);
  const auto k = kernel_function(cplx(1.0, -2.0), 0.7);
  EXPECT_EQ(k.log_profile(std::vector<cplx>{cplx(1.0, -2.0)}), 0.0);
  for (cplx z : {cplx(0.0), cplx(3, 1), cplx(1.0, -1.9)}) {
    const double lp = k.log_abs(z) - 0.5 * 0.7 * std::norm(z);
    EXPECT_LE(lp, 1e-14);
    EXPECT_NEAR(lp, k.log_profile(std::vector<cplx>{z}), 1e-12);
  }
}

TEST(Kernel, UnitNormInFockTwo) {
  for (double a : {0.5, 1.0, 2.0})
    for (cplx w : {cplx(0.0), cplx(1.0), cplx(0.0, 2.0), cplx(-2.5, 1.0)}) {
      const auto t = KernelFunction(w, a).taylor(KernelFunction::truncation_degree(a, std::abs(w)));
      EXPECT_NEAR(fock_norm_by_quadrature(t, a, 2.0), 0.0, 1e-8) << a << " " << w;
    }
}

TEST(Kernel, TruncationResidual) {
  for (double a : {0.5, 1.0, 2.0})
    for (double m : {0.0, 1.0, 2.5, 4.0}) {
      const cplx w = std::polar(m, 0.7);
      const KernelFunction k(w, a);
      const auto t = k.taylor(KernelFunction::truncation_degree(a, m));
      const double R = m + 3.0 / std::sqrt(a);
      for (int j = 0; j < 16; ++j) {
        const cplx z = std::polar(R, 0.7 + 2 * oracle::pi * j / 16);
        const double resid = std::abs(t(z) - k(z)) * std::exp(-0.5 * a * R * R);
        EXPECT_LE(resid, 1e-8) << a << " " << m;
      }
    }
}

TEST(RadialIdentity, Examples) {
  EXPECT_LE(radial_identity_check(EntireSymbol::monomial(2), AffineMap::identity(), EntireSymbol::monomial(1), 1.0),
            1e-8);
  EXPECT_EQ(radial_identity_check(EntireSymbol::constant(2.0), AffineMap(0.3, 1.0), EntireSymbol::monomial(3),
                                  cplx(1, 1)),
            0.0);
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> th(0, 2 * oracle::pi);
  for (int i = 0; i < 10; ++i)
    EXPECT_LE(radial_identity_check(EntireSymbol::monomial(1), AffineMap(0.5, 1.0), EntireSymbol::monomial(2),
                                    std::polar(2.0, th(rng))),
              1e-7);
}

TEST(Property, RadialIdentityRandom) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 20; ++i) {
    const auto g = poly(oracle::random_coeffs(rng, 1 + i % 4));
    const auto f = poly(oracle::random_coeffs(rng, i % 5));
    const AffineMap phi(cplx(n01(rng), n01(rng)), cplx(n01(rng), n01(rng)));
    const cplx z(n01(rng), n01(rng));
    EXPECT_LE(radial_identity_check(g, phi, f, z), 1e-7);
  }
}

TEST(OperatorSpec, Validation) {
  OperatorSpec s;
  s.g = EntireSymbol::monomial(1);
  EXPECT_NO_THROW(s.validate());
  s.kind = OperatorKind::companion_composed;
  s.g = EntireSymbol(2, {{{1, 0}, 1.0}});
  s.phi = AffineMap::identity(2);
  s.d = 2;
  EXPECT_THROW(s.validate(), DimensionError);
  s.kind = OperatorKind::volterra;
  EXPECT_NO_THROW(s.validate());
  s.alpha = -1;
  EXPECT_THROW(s.validate(), DomainError);
}
