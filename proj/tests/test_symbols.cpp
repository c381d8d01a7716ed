#include <gtest/gtest.h>

#include <random>

#include "fockop/symbols.hpp"
#include "oracles.hpp"

using namespace fockop;

namespace {

EntireSymbol poly(std::vector<cplx> c) { return EntireSymbol(std::move(c)); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST(Eval, Examples) {
  EXPECT_LT(std::abs(EntireSymbol::monomial(2)(cplx(3, 4)) - cplx(-7, 24)), 1e-12);
  EXPECT_EQ(EntireSymbol::constant(1.0)(cplx(5, -2)), cplx(1.0));
  EXPECT_EQ(EntireSymbol::monomial(3, 2.0)(1.0), cplx(2.0));
}

TEST(Eval, MatchesNaivePowers) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = oracle::random_coeffs(rng, 12);
    const cplx z(0.7 * (trial % 5) - 1.0, 0.3 * trial - 2.0);
    EXPECT_LT(rel(poly(c)(z), oracle::eval(c, z)), 1e-12);
  }
}

TEST(Eval, MultiVariable) {
  const EntireSymbol g(2, {{{1, 2}, 1.0}});
  const std::vector<cplx> z{cplx(2.0), cplx(0, 1)};
  EXPECT_LT(std::abs(g(z) - cplx(-2.0)), 1e-14);
}

TEST(RadialDerivative, Examples) {
  EXPECT_EQ(radial_derivative(EntireSymbol::monomial(2)), EntireSymbol::monomial(2, 2.0));
  const EntireSymbol g(2, {{{1, 2}, 1.0}});
  EXPECT_EQ(radial_derivative(g), EntireSymbol(2, {{{1, 2}, 3.0}}));
  EXPECT_TRUE(radial_derivative(EntireSymbol::constant(4.0)).is_zero());
}

TEST(RadialDerivative, VanishesAtOrigin) {
  std::mt19937_64 rng(2);
  EXPECT_EQ(radial_derivative(poly(oracle::random_coeffs(rng, 6))).at_origin(), cplx(0.0));
}

TEST(Derivative, Examples) {
  EXPECT_EQ(derivative(EntireSymbol::monomial(3)), EntireSymbol::monomial(2, 3.0));
  EXPECT_TRUE(derivative(EntireSymbol::constant(2.0)).is_zero());
  EXPECT_EQ(derivative(poly({1.0, 2.0, 1.0})), poly({2.0, 2.0}));
}

TEST(ComposeAffine, Examples) {
  EXPECT_EQ(compose_affine(EntireSymbol::monomial(2), AffineMap(1.0, 1.0)), poly({1.0, 2.0, 1.0}));
  EXPECT_EQ(compose_affine(EntireSymbol::monomial(1), AffineMap(0.5, 0.0)), poly({0.0, 0.5}));
  EXPECT_EQ(compose_affine(EntireSymbol::monomial(2), AffineMap(2.0, -1.0)), poly({1.0, -4.0, 4.0}));
}

TEST(CircleMax, Examples) {
  for (int n : {0, 1, 5, 20}) EXPECT_NEAR(circle_max_log(EntireSymbol::monomial(n), 2.0).log_max, n * std::log(2.0), 1e-12);
  EXPECT_NEAR(circle_max_log(poly({1.0, 1.0}), 1.0).log_max, std::log(2.0), 1e-10);
  EXPECT_EQ(circle_max_log(EntireSymbol(), 3.0).log_max, -std::numeric_limits<double>::infinity());
}

TEST(CircleMax, AgreesWithDenseGrid) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const auto c = oracle::random_coeffs(rng, 3 + 5 * trial);
    const double r = 0.5 + 0.4 * trial;
    const double ref = oracle::circle_max(c, r);
    EXPECT_GE(circle_max_log(poly(c), r).log_max, ref - 1e-9) << trial;
  }
}

TEST(Property, ProductRuleForRadialDerivative) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const auto f = poly(oracle::random_coeffs(rng, 1 + trial % 9));
    const auto g = poly(oracle::random_coeffs(rng, 2 + trial % 7));
    const auto lhs = radial_derivative(f * g);
    const auto rhs = f * radial_derivative(g) + g * radial_derivative(f);
    const auto& a = lhs.coefficients();
    const auto& b = rhs.coefficients();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LT(rel(a[k], b[k]), 1e-12);
  }
}

TEST(Property, RadialDerivativeOfAffineComposition) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 25; ++trial) {
    const auto f = poly(oracle::random_coeffs(rng, 1 + trial % 8));
    const AffineMap phi(cplx(n01(rng), n01(rng)), cplx(n01(rng), n01(rng)));
    const cplx z(n01(rng), n01(rng));
    const cplx lhs = radial_derivative(compose_affine(f, phi))(z);
    const cplx rhs = z * phi.beta * derivative(f)(phi(z));
    EXPECT_LT(rel(lhs, rhs), 1e-10);
  }
}

TEST(Property, CircleMaxBelowCoefficientBound) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const auto f = poly(oracle::random_coeffs(rng, trial % 30));
    for (double r : {0.0, 0.1, 1.0, 3.7, 25.0}) {
      const auto m = circle_max_log(f, r);
      EXPECT_LE(m.log_max, f.log_coefficient_bound(r) + 1e-12);
    }
  }
}

TEST(Symbols, DimensionErrors) {
  const EntireSymbol g(2, {{{1, 0}, 1.0}});
  EXPECT_THROW(derivative(g), DimensionError);
  EXPECT_THROW(circle_max_log(g, 1.0), DimensionError);
  EXPECT_THROW(g + EntireSymbol::monomial(1), DimensionError);
}
