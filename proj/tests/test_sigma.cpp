#include "ahgeom/sigma.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

TEST(SecondFundamentalForm, ListedValues) {
  const double m = 2.0;
  const auto h = ahgeom::second_fundamental_form(m);
  EXPECT_EQ(h(0, 2, 2), -0.25);
  EXPECT_EQ(h(0, 3, 3), 0.25);
  EXPECT_EQ(h(1, 2, 3), 0.25);
  EXPECT_EQ(h(1, 3, 2), 0.25);
  EXPECT_EQ(h(0, 2, 3), 0.0);
  EXPECT_EQ(h(0, 3, 2), 0.0);
  EXPECT_EQ(h(1, 2, 2), 0.0);
  EXPECT_EQ(h(1, 3, 3), 0.0);
  EXPECT_THROW(ahgeom::second_fundamental_form(0), ahgeom::DomainError);
}

TEST(SecondFundamentalForm, MinimalAndNorm) {
  for (double m : {0.5, 1.0, 3.0}) {
    const auto h = ahgeom::second_fundamental_form(m);
    EXPECT_EQ(h.mean_curvature(0), 0.0);
    EXPECT_EQ(h.mean_curvature(1), 0.0);
    EXPECT_DOUBLE_EQ(h.norm_squared(), 1 / (m * m));
  }
}

TEST(Stability, OperatorIsIdentityOverMSquared) {
  for (double m : {0.5, 1.0, 2.0, 10.0}) {
    const auto op = ahgeom::stability_operator(m);
    // Hand assembly: diagonal k2 + k3 - |h_mu|^2 with |h_mu|^2 = 1/(2m^2),
    // off-diagonal zero since h_0 and h_1 are orthogonal.
    const auto k = ahgeom::kappa_at_zero(m);
    const double diag = k.k2 + k.k3 - 1 / (2 * m * m);
    EXPECT_NEAR(diag, 1 / (m * m), 1e-15 / (m * m));
    const double unit = 1 / (m * m);
    EXPECT_NEAR(op(0, 0), unit, 1e-12 * unit);
    EXPECT_NEAR(op(1, 1), unit, 1e-12 * unit);
    EXPECT_NEAR(op(0, 1), 0.0, 1e-12 * unit);
    EXPECT_NEAR(op(1, 0), 0.0, 1e-12 * unit);
    const auto ev = ahgeom::stability_eigenvalues(op);
    EXPECT_GT(ev(0), 0.0);
    EXPECT_NEAR(ev(1), unit, 1e-12 * unit);
  }
}

TEST(Calibration, BoundAlongTheProfile) {
  for (double m : {1.0, 2.5}) {
    const auto p = ahgeom::integrate(ahgeom::ModelParams::with_scale(m));
    std::vector<double> grid{0.0};
    for (double r : ahgeom::uniform_grid(p.r_max(), 1000)) grid.push_back(r);
    const auto res = ahgeom::calibration_check(p, grid);
    EXPECT_TRUE(res.bound_holds);
    EXPECT_TRUE(res.monotone);
    EXPECT_DOUBLE_EQ(res.min_abs_bc, m * m);
    EXPECT_GT(res.worst_margin, 0.0);
  }
}

TEST(Calibration, SmallRadiusExpansion) {
  // bc = -m^2 - r^2/2 + O(r^3).
  const auto p = ahgeom::integrate(ahgeom::ModelParams{});
  for (double r : {1e-3, 1e-2}) {
    const auto s = p.eval(r);
    EXPECT_NEAR(s.b * s.c, -1 - r * r / 2, 2 * r * r * r);
  }
}

TEST(Calibration, ViolationDetected) {
  // A fake profile whose bc rises above -m^2.
  auto series = ahgeom::expand(1.0, 6);
  std::vector<ahgeom::CoefficientSample> samples{
      {1.0, 1.0, -0.9, 1.0, 0.5, 0.1, 0.1, 0, 0, 0, 0.0},
      {2.0, 2.0, -0.8, 1.0, 0.5, 0.1, 0.1, 0, 0, 0, -1.0}};
  const ahgeom::MetricProfile fake(ahgeom::ModelParams{}, series, samples);
  const std::vector<double> grid{1.0, 2.0};
  const auto res = ahgeom::calibration_check(fake, grid);
  EXPECT_FALSE(res.bound_holds);
  EXPECT_FALSE(res.monotone);
  EXPECT_LT(res.worst_margin, 0.0);
}

TEST(Sigma, Area) {
  EXPECT_DOUBLE_EQ(ahgeom::sigma_area(1.0), 4 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(ahgeom::sigma_area(3.0), 36 * std::numbers::pi);
  EXPECT_THROW(ahgeom::sigma_area(-1.0), ahgeom::DomainError);
}
