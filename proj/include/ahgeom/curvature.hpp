#pragma once

// Connection and curvature of the metric in the orthonormal coframe
// w0 = -dr, w1 = a s1, w2 = b s2, w3 = c s3.
//
// Every nontrivial Riemann component is one of three numbers: kappa(a,b,c),
// kappa(b,c,a), kappa(c,a,b).

#include "ahgeom/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ahgeom {

/// Connection one-form coefficients (up to sign):
/// w0^1 = -w01 w^1, w0^2 = -w02 w^2, w0^3 = -w03 w^3,
/// w2^3 = -w23 w^1, w3^1 = -w31 w^2, w1^2 = -w12 w^3.
struct ConnectionCoefficients {
  double w01 = 0, w02 = 0, w03 = 0;
  double w23 = 0, w31 = 0, w12 = 0;
};

/// (k1, k2, k3) = (kappa(a,b,c), kappa(b,c,a), kappa(c,a,b)).
struct CurvatureComponents {
  double k1 = 0, k2 = 0, k3 = 0;

  double cyclic_sum() const { return k1 + k2 + k3; }
  double scale() const { return std::max({std::abs(k1), std::abs(k2), std::abs(k3)}); }
};

/// The curvature function
///
///   kappa(a,b,c) = [2a^4 - a^2 (b-c)^2 - a^3 (b+c) + a (b-c)^2 (b+c)
///                   - (b+c)^2 (b-c)^2] / (2 (abc)^2).
///
/// The numerator is accumulated in long double: along the large-r end of the
/// profile its terms are ~1e5 times the result.  Written through (b - c)^2 and
/// b + c and bc, so kappa(a,b,c) == kappa(a,c,b) bit for bit.
inline double kappa(double a, double b, double c) {
  if (a == 0 || b == 0 || c == 0) throw DomainError("kappa requires abc != 0; use kappa_at_zero");
  using ld = long double;
  const ld A = a, s = ld(b) + ld(c), t = ld(b) - ld(c);
  const ld t2 = t * t;
  const ld num = 2 * A * A * A * A - A * A * t2 - A * A * A * s + A * t2 * s - s * s * t2;
  const ld abc = A * (ld(b) * ld(c));
  return static_cast<double>(num / (2 * abc * abc));
}

/// Sum of the absolute numerator terms of kappa over 2(abc)^2: the size
/// against which rounding in kappa is measured.
inline double kappa_term_scale(double a, double b, double c) {
  const double s = b + c, t2 = (b - c) * (b - c);
  const double terms = 2 * a * a * a * a + a * a * t2 + std::abs(a * a * a * s) +
                       std::abs(a * t2 * s) + s * s * t2;
  const double abc = a * b * c;
  return terms / (2 * abc * abc);
}

/// Closed-form limits on the zero section.
inline CurvatureComponents kappa_at_zero(double m) {
  if (!(m > 0)) throw DomainError("kappa_at_zero requires m > 0");
  const double m2 = m * m;
  return {-3.0 / (2 * m2), 3.0 / (4 * m2), 3.0 / (4 * m2)};
}

inline ConnectionCoefficients connection(const CoefficientSample& s) {
  if (s.a == 0 || s.b == 0 || s.c == 0) throw DomainError("connection requires r > 0");
  const double abc2 = 2 * s.a * s.b * s.c;
  return {s.da / s.a,
          s.db / s.b,
          s.dc / s.c,
          (s.b * s.b + s.c * s.c - s.a * s.a) / abc2,
          (s.a * s.a + s.c * s.c - s.b * s.b) / abc2,
          (s.a * s.a + s.b * s.b - s.c * s.c) / abc2};
}

/// Scalar content of w0^i + wj^k = -s^i:
/// e1 = a' + (b^2 + c^2 - a^2) / (2bc) - 1, and cyclic.
inline std::array<double, 3> asd_residual(const CoefficientSample& s) {
  if (s.a == 0 || s.b == 0 || s.c == 0) throw DomainError("asd_residual requires r > 0");
  const double a2 = s.a * s.a, b2 = s.b * s.b, c2 = s.c * s.c;
  return {s.da + (b2 + c2 - a2) / (2 * s.b * s.c) - 1,
          s.db + (c2 + a2 - b2) / (2 * s.c * s.a) - 1,
          s.dc + (a2 + b2 - c2) / (2 * s.a * s.b) - 1};
}

inline CurvatureComponents curvature_components(const CoefficientSample& s) {
  if (s.a == 0 || s.b == 0 || s.c == 0)
    throw DomainError("curvature_components requires r > 0; use kappa_at_zero");
  return {kappa(s.a, s.b, s.c), kappa(s.b, s.c, s.a), kappa(s.c, s.a, s.b)};
}

/// Largest relative disagreement between (k1, k2, k3) and (a''/a, b''/b, c''/c),
/// measured against max(1, |k_i|).
inline double second_derivative_mismatch(const CoefficientSample& s) {
  const auto k = curvature_components(s);
  auto rel = [](double kv, double ratio) { return std::abs(kv - ratio) / std::max(1.0, std::abs(kv)); };
  return std::max({rel(k.k1, s.dda / s.a), rel(k.k2, s.ddb / s.b), rel(k.k3, s.ddc / s.c)});
}

/// Riemann component R_{ijkl} in the orthonormal frame (indices 0..3),
/// assembled from the three kappa values by the curvature symmetries.
inline double riemann(const CurvatureComponents& k, int i, int j, int p, int q) {
  struct Entry {
    int i, j, k, l;
    double CurvatureComponents::*value;
  };
  static constexpr Entry table[] = {
      {1, 0, 0, 1, &CurvatureComponents::k1}, {2, 3, 0, 1, &CurvatureComponents::k1},
      {2, 3, 3, 2, &CurvatureComponents::k1}, {2, 0, 0, 2, &CurvatureComponents::k2},
      {3, 1, 0, 2, &CurvatureComponents::k2}, {3, 1, 1, 3, &CurvatureComponents::k2},
      {3, 0, 0, 3, &CurvatureComponents::k3}, {1, 2, 0, 3, &CurvatureComponents::k3},
      {1, 2, 2, 1, &CurvatureComponents::k3},
  };
  // Antisymmetry in each pair, symmetry under exchanging the pairs.
  auto pair_sign = [](int x, int y, int u, int v) {
    if (x == u && y == v) return 1;
    if (x == v && y == u) return -1;
    return 0;
  };
  for (const auto& e : table) {
    int sg = pair_sign(i, j, e.i, e.j) * pair_sign(p, q, e.k, e.l);
    if (sg == 0) sg = pair_sign(i, j, e.k, e.l) * pair_sign(p, q, e.i, e.j);
    if (sg != 0) return sg * (k.*e.value);
  }
  return 0.0;
}

/// Gauss curvature of the totally geodesic fiber dr^2 + (a^2/4) dpsi^2,
/// K = -a''/a.  At r = 0 the limit 3/(2m^2) is returned (m = c there).
inline double fiber_gauss_curvature(const CoefficientSample& s) {
  if (s.a == 0) {
    if (!(s.c > 0)) throw DomainError("fiber_gauss_curvature at r = 0 needs c(0) = m > 0");
    return -kappa_at_zero(s.c).k1;
  }
  return -s.dda / s.a;
}

}  // namespace ahgeom
