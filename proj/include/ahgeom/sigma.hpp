#pragma once

// The zero-section sphere at r = 0: its second fundamental form, the
// zeroth-order part R - A of its Jacobi operator, and the calibration bound.
//
// Frame convention: e0, e1 are normal to the sphere, e2, e3 tangent.

#include "ahgeom/curvature.hpp"
#include "ahgeom/ode.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace ahgeom {

struct SecondFundamentalForm {
  double m = 1.0;
  // h[mu][j-2][k-2] for normal mu in {0,1}, tangent j, k in {2,3}.
  std::array<std::array<std::array<double, 2>, 2>, 2> h{};

  double operator()(int mu, int j, int k) const { return h.at(mu).at(j - 2).at(k - 2); }

  /// Trace over the tangent directions: the mu-th mean curvature component.
  double mean_curvature(int mu) const { return (*this)(mu, 2, 2) + (*this)(mu, 3, 3); }

  double norm_squared() const {
    double s = 0;
    for (const auto& mu : h)
      for (const auto& row : mu)
        for (double v : row) s += v * v;
    return s;
  }
};

/// -h022 = h033 = h123 = h132 = 1/(2m); h023 = h032 = h122 = h133 = 0.
inline SecondFundamentalForm second_fundamental_form(double m) {
  if (!(m > 0)) throw DomainError("second_fundamental_form requires m > 0");
  const double v = 1.0 / (2 * m);
  SecondFundamentalForm f;
  f.m = m;
  f.h[0][0][0] = -v;  // h022
  f.h[0][1][1] = v;   // h033
  f.h[1][0][1] = v;   // h123
  f.h[1][1][0] = v;   // h132
  return f;
}

using StabilityMatrix = Eigen::Matrix2d;

/// (R - A)_{mu nu} = -sum_l R_{l mu l nu} - sum_{l,k} h_{mu l k} h_{nu l k},
/// with curvature from the zero-section limits of kappa.
inline StabilityMatrix stability_operator(double m) {
  const auto k = kappa_at_zero(m);
  const auto h = second_fundamental_form(m);
  StabilityMatrix out;
  for (int mu = 0; mu < 2; ++mu) {
    for (int nu = 0; nu < 2; ++nu) {
      double v = 0;
      for (int l = 2; l <= 3; ++l) {
        v -= riemann(k, l, mu, l, nu);
        for (int kk = 2; kk <= 3; ++kk) v -= h(mu, l, kk) * h(nu, l, kk);
      }
      out(mu, nu) = v;
    }
  }
  return out;
}

/// Eigenvalues of R - A, ascending.
inline Eigen::Vector2d stability_eigenvalues(const StabilityMatrix& op) {
  Eigen::SelfAdjointEigenSolver<StabilityMatrix> es(op, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

struct CalibrationResult {
  double min_abs_bc = 0;     // min over the grid of |bc|
  bool monotone = false;     // bc strictly decreasing along the grid and (bc)' < 0 for r > 0
  bool bound_holds = false;  // bc <= -m^2 (1 - 1e-8) everywhere, strict for r > 0
  double worst_margin = 0;   // min over r > 0 of (-bc - m^2) / m^2
};

/// Checks bc <= -m^2 and that bc decreases; the comass of m^2 s2^s3 at
/// radius r is m^2 / |bc|, so this is the comass-one condition.
inline CalibrationResult calibration_check(const MetricProfile& profile,
                                           std::span<const double> grid) {
  const double m = profile.params().m;
  const double m2 = m * m;
  CalibrationResult res;
  res.min_abs_bc = std::numeric_limits<double>::infinity();
  res.worst_margin = std::numeric_limits<double>::infinity();
  res.monotone = true;
  res.bound_holds = true;
  double prev_r = -1, prev_bc = 0;
  for (double r : grid) {
    const auto s = profile.eval(r);
    const double bc = s.b * s.c;
    res.min_abs_bc = std::min(res.min_abs_bc, std::abs(bc));
    if (!(bc <= -m2 * (1 - 1e-8))) res.bound_holds = false;
    if (r > 0) {
      const double margin = (-bc - m2) / m2;
      res.worst_margin = std::min(res.worst_margin, margin);
      if (!(margin > 0)) res.bound_holds = false;
      if (!(s.db * s.c + s.b * s.dc < 0)) res.monotone = false;
    }
    if (prev_r >= 0) {
      if (!(r > prev_r) || !(bc < prev_bc)) res.monotone = false;
    }
    prev_r = r;
    prev_bc = bc;
  }
  return res;
}

/// Area of the round sphere of radius m.
inline double sigma_area(double m) {
  if (!(m > 0)) throw DomainError("sigma_area requires m > 0");
  return 4 * std::numbers::pi * m * m;
}

}  // namespace ahgeom
