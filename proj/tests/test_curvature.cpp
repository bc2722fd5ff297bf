#include "ahgeom/curvature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

const ahgeom::MetricProfile& unit_profile() {
  static const auto p = ahgeom::integrate(ahgeom::ModelParams{});
  return p;
}

}  // namespace

TEST(Kappa, WorkedExample) {
  EXPECT_NEAR(ahgeom::kappa(1, 2, 3), -1.0 / 3, 1e-15);
}

TEST(Kappa, SymmetryAndCyclicSumOnRandomTriples) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng), b = -u(rng), c = u(rng);
    EXPECT_EQ(ahgeom::kappa(a, b, c), ahgeom::kappa(a, c, b));
    const ahgeom::CurvatureComponents k{ahgeom::kappa(a, b, c), ahgeom::kappa(b, c, a),
                                        ahgeom::kappa(c, a, b)};
    const double bound = 1e-13 * std::max({ahgeom::kappa_term_scale(a, b, c),
                                           ahgeom::kappa_term_scale(b, c, a),
                                           ahgeom::kappa_term_scale(c, a, b)});
    ASSERT_LE(std::abs(k.cyclic_sum()), bound) << a << " " << b << " " << c;
  }
}

TEST(Kappa, SingularArgumentsRejected) {
  EXPECT_THROW(ahgeom::kappa(0, -1, 1), ahgeom::DomainError);
  EXPECT_THROW(ahgeom::kappa_at_zero(0), ahgeom::DomainError);
}

TEST(Kappa, ZeroSectionLimit) {
  const auto k = ahgeom::kappa_at_zero(1.0);
  EXPECT_EQ(k.k1, -1.5);
  EXPECT_EQ(k.k2, 0.75);
  EXPECT_EQ(k.k3, 0.75);
  const auto k2 = ahgeom::kappa_at_zero(2.0);
  EXPECT_EQ(k2.k1, -1.5 / 4);

  const auto near = ahgeom::curvature_components(unit_profile().eval(1e-4));
  EXPECT_NEAR(near.k1, k.k1, 1e-3 * 1.5);
  EXPECT_NEAR(near.k2, k.k2, 1e-3 * 1.5);
  EXPECT_NEAR(near.k3, k.k3, 1e-3 * 1.5);
}

TEST(Curvature, CyclicSumAlongProfile) {
  const auto& p = unit_profile();
  for (double r : ahgeom::uniform_grid(20.0, 1000)) {
    const auto k = ahgeom::curvature_components(p.eval(r));
    ASSERT_LE(std::abs(k.cyclic_sum()), 1e-12 * k.scale()) << "r = " << r;
  }
}

TEST(Curvature, KappaMatchesFiniteDifferenceSecondDerivative) {
  // a'' from a central difference of a' = rhs(a, b, c), independent of the
  // chain-rule second derivatives stored in the profile.
  const auto& p = unit_profile();
  const double h = 1e-3;
  for (double r : {0.3, 1.0, 1.7, 4.0, 9.0}) {
    const auto lo = p.eval(r - h), mid = p.eval(r), hi = p.eval(r + h);
    const auto k = ahgeom::curvature_components(mid);
    const auto dlo = ahgeom::rhs(lo.a, lo.b, lo.c), dhi = ahgeom::rhs(hi.a, hi.b, hi.c);
    const double dda = (dhi.da - dlo.da) / (2 * h);
    const double ddb = (dhi.db - dlo.db) / (2 * h);
    const double ddc = (dhi.dc - dlo.dc) / (2 * h);
    EXPECT_NEAR(dda / mid.a, k.k1, 1e-5 * std::max(1.0, std::abs(k.k1))) << r;
    EXPECT_NEAR(ddb / mid.b, k.k2, 1e-5 * std::max(1.0, std::abs(k.k2))) << r;
    EXPECT_NEAR(ddc / mid.c, k.k3, 1e-5 * std::max(1.0, std::abs(k.k3))) << r;
  }
}

TEST(Curvature, SecondDerivativeMismatchSmall) {
  for (const auto& s : unit_profile().samples()) ASSERT_LE(ahgeom::second_derivative_mismatch(s), 1e-6);
}

TEST(Asd, ResidualsVanishOnStoredSamples) {
  for (const auto& s : unit_profile().samples()) {
    for (double e : ahgeom::asd_residual(s)) ASSERT_LE(std::abs(e), 1e-9) << "r = " << s.r;
  }
}

TEST(Asd, PerturbationIsDetected) {
  auto s = unit_profile().eval(2.0);
  s.da += 0.01;
  const auto e = ahgeom::asd_residual(s);
  EXPECT_NEAR(e[0], 0.01, 1e-9);
  EXPECT_LE(std::abs(e[1]), 1e-9);
}

TEST(Asd, EquivalentToTheOde) {
  // e1 = a' - a'_ode exactly: (b^2 + c^2 - a^2)/(2bc) - 1 = -(a^2 - (b-c)^2)/(2bc).
  const ahgeom::CoefficientSample s{1.0, 1.2, -0.7, 1.9, 0.3, 0.1, 0.8};
  const auto d = ahgeom::rhs(s.a, s.b, s.c);
  const auto e = ahgeom::asd_residual(s);
  EXPECT_NEAR(e[0], s.da - d.da, 1e-15);
  EXPECT_NEAR(e[1], s.db - d.db, 1e-15);
  EXPECT_NEAR(e[2], s.dc - d.dc, 1e-15);
}

TEST(Riemann, SymmetriesAndBianchi) {
  const ahgeom::CurvatureComponents k{-0.9, 0.2, 0.7};
  EXPECT_EQ(ahgeom::riemann(k, 0, 1, 0, 1), -k.k1);
  EXPECT_EQ(ahgeom::riemann(k, 0, 1, 1, 0), k.k1);
  EXPECT_EQ(ahgeom::riemann(k, 2, 3, 2, 3), -k.k1);
  EXPECT_EQ(ahgeom::riemann(k, 0, 2, 0, 2), -k.k2);
  EXPECT_EQ(ahgeom::riemann(k, 0, 3, 0, 3), -k.k3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) {
          const double v = ahgeom::riemann(k, i, j, p, q);
          EXPECT_EQ(v, -ahgeom::riemann(k, j, i, p, q));
          EXPECT_EQ(v, -ahgeom::riemann(k, i, j, q, p));
          EXPECT_EQ(v, ahgeom::riemann(k, p, q, i, j));
        }
  // The first Bianchi combination reduces to the cyclic sum.
  EXPECT_NEAR(ahgeom::riemann(k, 0, 1, 2, 3) + ahgeom::riemann(k, 0, 2, 3, 1) +
                  ahgeom::riemann(k, 0, 3, 1, 2),
              k.cyclic_sum(), 1e-15);
}

TEST(Riemann, BianchiVanishesForCurvatureOfTheMetric) {
  const auto k = ahgeom::curvature_components(unit_profile().eval(3.0));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) {
          const double b = ahgeom::riemann(k, i, j, p, q) + ahgeom::riemann(k, i, p, q, j) +
                           ahgeom::riemann(k, i, q, j, p);
          ASSERT_LE(std::abs(b), 1e-12 * k.scale());
        }
}

TEST(Fiber, GaussCurvature) {
  const auto& p = unit_profile();
  EXPECT_EQ(ahgeom::fiber_gauss_curvature(p.eval(0.0)), 1.5);
  EXPECT_NEAR(ahgeom::fiber_gauss_curvature(p.eval(1e-4)), 1.5, 1.5e-3);
  const auto s = p.eval(2.0);
  EXPECT_NEAR(ahgeom::fiber_gauss_curvature(s), -ahgeom::kappa(s.a, s.b, s.c), 1e-8);
}

TEST(Connection, Coefficients) {
  const ahgeom::CoefficientSample s{1.0, 1.0, -2.0, 3.0, 0.5, 0.25, 2.0};
  const auto w = ahgeom::connection(s);
  EXPECT_DOUBLE_EQ(w.w01, 0.5);
  EXPECT_DOUBLE_EQ(w.w02, -0.125);
  EXPECT_DOUBLE_EQ(w.w03, 2.0 / 3);
  EXPECT_DOUBLE_EQ(w.w23, (4.0 + 9 - 1) / (2 * 1 * -2.0 * 3));
}
