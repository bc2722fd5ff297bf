#include "ahgeom/series.hpp"

#include <gtest/gtest.h>

#include <cmath>

using ahgeom::Rational;

namespace {

Rational b_coeff(const ahgeom::SeriesCoefficients& s, int k) {
  return (s.coeff_p[k] - s.coeff_q[k]) / 2;
}
Rational c_coeff(const ahgeom::SeriesCoefficients& s, int k) {
  return (s.coeff_p[k] + s.coeff_q[k]) / 2;
}

}  // namespace

TEST(Series, PrintedLowOrderTerms) {
  const auto s = ahgeom::expand(1.0, 4);
  EXPECT_EQ(s.coeff_a[0], 0);
  EXPECT_EQ(s.coeff_a[1], 2);
  EXPECT_EQ(s.coeff_a[2], 0);
  EXPECT_EQ(s.coeff_a[3], Rational(-1, 2));
  EXPECT_EQ(b_coeff(s, 0), -1);
  EXPECT_EQ(b_coeff(s, 1), Rational(1, 2));
  EXPECT_EQ(b_coeff(s, 2), Rational(-3, 8));
  EXPECT_EQ(c_coeff(s, 0), 1);
  EXPECT_EQ(c_coeff(s, 1), Rational(1, 2));
  EXPECT_EQ(c_coeff(s, 2), Rational(3, 8));
}

TEST(Series, OrderSixRegressionValues) {
  const auto s = ahgeom::expand(1.0, 6);
  EXPECT_EQ(s.coeff_a[5], Rational(3, 8));
  EXPECT_EQ(s.coeff_q[4], Rational(-15, 64));
  EXPECT_EQ(s.coeff_p[5], Rational(-3, 32));
}

TEST(Series, HigherOrderValues) {
  const auto s = ahgeom::expand(1.0, 10);
  EXPECT_EQ(s.coeff_a[7], Rational(-39, 128));
  EXPECT_EQ(s.coeff_a[9], Rational(265, 1024));
  EXPECT_EQ(s.coeff_p[7], Rational(69, 1024));
  EXPECT_EQ(s.coeff_p[9], Rational(-205, 4096));
  EXPECT_EQ(s.coeff_q[6], Rational(63, 512));
  EXPECT_EQ(s.coeff_q[8], Rational(-1287, 16384));
  EXPECT_EQ(s.coeff_q[10], Rational(7359, 131072));
}

TEST(Series, ParityAtEveryOrder) {
  for (int n = 4; n <= 14; ++n) {
    const auto s = ahgeom::expand(1.0, n);
    EXPECT_TRUE(ahgeom::has_parity(s)) << "order " << n;
    EXPECT_TRUE(ahgeom::residual(s)) << "order " << n;
  }
}

TEST(Series, PerturbedCoefficientBreaksResidual) {
  auto s = ahgeom::expand(1.0, 6);
  s.coeff_q[2] += Rational(1, 1000);
  EXPECT_FALSE(ahgeom::residual(s));
}

TEST(Series, ParityViolationDetected) {
  auto s = ahgeom::expand(1.0, 6);
  s.coeff_a[2] = Rational(1, 7);
  EXPECT_FALSE(ahgeom::has_parity(s));
}

TEST(Series, RationalScaleCovariance) {
  // Solving directly at m = 3 agrees with the unit coefficients times m^(1-k).
  const auto unit = ahgeom::expand(1.0, 8);
  const auto scaled = ahgeom::scaled_coefficients(unit, Rational(3));
  const auto direct = ahgeom::solve_recurrence(Rational(3), 8);
  EXPECT_EQ(scaled.a, direct.a);
  EXPECT_EQ(scaled.p, direct.p);
  EXPECT_EQ(scaled.q, direct.q);
}

TEST(Series, RejectsBadArguments) {
  EXPECT_THROW(ahgeom::expand(1.0, 3), ahgeom::SeriesError);
  EXPECT_THROW(ahgeom::expand(0.0, 6), ahgeom::SeriesError);
  EXPECT_THROW(ahgeom::expand(-2.0, 6), ahgeom::SeriesError);
}

TEST(Series, EvaluationSolvesTheOdeNearZero) {
  // Plug the truncated series into the ODE in (a, p, q) form; the defect must
  // shrink like r^order.
  const double m = 1.5;
  const auto s = ahgeom::expand(m, 10);
  double prev = 0;
  for (double r : {0.08, 0.04}) {
    const auto v = ahgeom::evaluate(s, r);
    const double den = v.p * v.p - v.q * v.q;
    const double da = 2 * (v.a * v.a - v.q * v.q) / den;
    const double dq = 2 * v.q * (v.p * v.p - v.a * v.a) / (v.a * den);
    const double dp = 2 + 2 * v.p * (v.q * v.q - v.a * v.a) / (v.a * den);
    const double defect = std::max({std::abs(da - v.da), std::abs(dq - v.dq), std::abs(dp - v.dp)});
    EXPECT_LT(defect, 1e-9);
    if (prev > 0) EXPECT_LT(defect, prev / 100);
    prev = defect;
  }
}

TEST(Series, EvaluationAtZeroIsExact) {
  const auto s = ahgeom::expand(2.0, 8);
  const auto v = ahgeom::evaluate(s, 0.0);
  EXPECT_EQ(v.a, 0.0);
  EXPECT_EQ(v.p, 0.0);
  EXPECT_EQ(v.q, 4.0);
  EXPECT_EQ(v.da, 2.0);
  EXPECT_EQ(v.dp, 1.0);
  EXPECT_EQ(v.dq, 0.0);
  EXPECT_EQ(v.ddq, 2 * 0.75 / 2.0);
}

TEST(Series, BootstrapRadiusMeetsThreshold) {
  const auto s = ahgeom::expand(1.0, 10);
  const double r0 = ahgeom::bootstrap_radius(s, 1e-11);
  EXPECT_GT(r0, 0.0);
  EXPECT_LE(ahgeom::truncation_bound(s, r0), 1e-11 * (1 + 1e-9));
  EXPECT_GT(ahgeom::truncation_bound(s, 1.01 * r0), 1e-11);
  // Scale invariance of the bound in t = r/m.
  const auto s2 = ahgeom::expand(4.0, 10);
  EXPECT_NEAR(ahgeom::bootstrap_radius(s2, 1e-11), 4 * r0, 1e-12 * r0);
}
