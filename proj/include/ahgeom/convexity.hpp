#pragma once

// Two-convexity of the squared distance r^2 to the zero section.
//
// In the coframe w0..w3,
//   Hess(r^2) = 2 (w0^2 + r a'/a w1^2 + r b'/b w2^2 + r c'/c w3^2),
// so its spectrum is {2, 2r a'/a, 2r b'/b, 2r c'/c}.

#include "ahgeom/ode.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <utility>

namespace ahgeom {

struct HessianSpectrum {
  double r = 0;
  std::array<double, 4> frame{};  // diagonal entries in coframe order w0..w3
  std::array<double, 4> eig{};    // the same values, ascending
  double min2sum = 0;             // eig[0] + eig[1]
};

namespace convexity_detail {
inline HessianSpectrum from_frame(double r, std::array<double, 4> frame) {
  HessianSpectrum h;
  h.r = r;
  h.frame = frame;
  h.eig = frame;
  std::sort(h.eig.begin(), h.eig.end());
  h.min2sum = h.eig[0] + h.eig[1];
  return h;
}
}  // namespace convexity_detail

inline HessianSpectrum hessian_r2(const CoefficientSample& s) {
  if (!(s.r > 0) || s.a == 0) throw DomainError("hessian_r2 requires r > 0; use hessian_r2_at_zero");
  return convexity_detail::from_frame(
      s.r, {2.0, 2 * s.r * s.da / s.a, 2 * s.r * s.db / s.b, 2 * s.r * s.dc / s.c});
}

/// Limit on the zero section: twice the projection onto the normal plane.
inline HessianSpectrum hessian_r2_at_zero() {
  return convexity_detail::from_frame(0.0, {2.0, 2.0, 0.0, 0.0});
}

/// Gaps of 1 > r a'/a > r c'/c > -r b'/b > 0, in that order.
///
/// The second gap is r (a'/a - c'/c) = r (c - a)(a' - a g) / (ac) with
/// g = (c - a)'/(c - a); the direct difference loses all digits once c - a
/// falls below the rounding level of c.
inline std::array<double, 4> chain_margins(const CoefficientSample& s) {
  if (!(s.r > 0) || s.a == 0) throw DomainError("chain_margins requires r > 0");
  const double ra = s.r * s.da / s.a;
  const double rc = s.r * s.dc / s.c;
  const double rb = s.r * s.db / s.b;
  const double rate = gap_rate(s.a, s.b, s.c);
  const double ac_gap = s.r * s.gap * (s.da - s.a * rate) / (s.a * s.c);
  return {1 - ra, ac_gap, rc + rb, -rb};
}

/// Smallest value of each of the four gaps over the grid.
inline std::array<double, 4> chain_check(const MetricProfile& profile, std::span<const double> grid) {
  std::array<double, 4> worst;
  worst.fill(std::numeric_limits<double>::infinity());
  for (double r : grid) {
    const auto g = chain_margins(profile.eval(r));
    for (std::size_t i = 0; i < 4; ++i) worst[i] = std::min(worst[i], g[i]);
  }
  return worst;
}

/// min over k-dimensional subspaces L of tr_L Hess(r^2): the sum of the k
/// smallest eigenvalues.
inline double min_trace_over_kplanes(const HessianSpectrum& spectrum, int k) {
  if (k < 1 || k > 4) throw DomainError("k must lie in 1..4");
  return std::accumulate(spectrum.eig.begin(), spectrum.eig.begin() + k, 0.0);
}

namespace convexity_detail {

using Frame = Eigen::Matrix<double, 4, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;

// Modified Gram-Schmidt; returns false on a numerically dependent frame.
inline bool orthonormalize(Frame& f) {
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) f.col(j) -= f.col(i).dot(f.col(j)) * f.col(i);
    const double n = f.col(j).norm();
    if (!(n > 1e-12)) return false;
    f.col(j) /= n;
  }
  return true;
}

inline double plane_trace(const Eigen::Matrix4d& q, const Frame& f) {
  return (f.transpose() * q * f).trace();
}

}  // namespace convexity_detail

/// Random-search minimum of tr_L Hess(r^2) over k-planes L.
///
/// Half of the trials are independent frames of standard normals,
/// orthonormalized (uniform on the Grassmannian); the other half perturb the
/// best frame found so far with an adaptive Gaussian step.  The eigenvalues
/// of the Hessian are never consulted.  Deterministic for a given seed.
inline double brute_force_plane_min(const CoefficientSample& sample, int k, long trials,
                                    std::uint64_t seed = 0x5eed) {
  using convexity_detail::Frame;
  if (k < 1 || k > 4) throw DomainError("k must lie in 1..4");
  if (trials < 1) throw DomainError("trials must be positive");
  const auto hess = hessian_r2(sample);
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 4; ++i) q(i, i) = hess.frame[static_cast<std::size_t>(i)];

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Frame& f) {
    for (Eigen::Index j = 0; j < f.cols(); ++j)
      for (Eigen::Index i = 0; i < 4; ++i) f(i, j) = normal(rng);
  };

  Frame best(4, k), trial(4, k);
  double best_value = std::numeric_limits<double>::infinity();
  const long global = std::max(1L, trials / 2);
  for (long t = 0; t < global; ++t) {
    gaussian(trial);
    if (!convexity_detail::orthonormalize(trial)) continue;
    const double v = convexity_detail::plane_trace(q, trial);
    if (v < best_value) {
      best_value = v;
      best = trial;
    }
  }

  double sigma = 0.3;
  Frame noise(4, k);
  for (long t = global; t < trials; ++t) {
    gaussian(noise);
    trial = best + sigma * noise;
    if (!convexity_detail::orthonormalize(trial)) continue;
    const double v = convexity_detail::plane_trace(q, trial);
    if (v < best_value) {
      best_value = v;
      best = trial;
      sigma = std::min(1.0, sigma * 1.5);
    } else {
      sigma = std::max(1e-9, sigma * 0.98);
    }
  }
  return best_value;
}

struct SignReport {
  bool a_concave = false;  // a'' < 0 on the whole grid
  bool b_concave = false;  // b'' < 0 on the whole grid
  int c_sign_changes = 0;  // sign changes of c'' between consecutive grid points
  std::optional<double> c_crossing;  // first bracketed zero of c'', by bisection
};

/// c'' at radius r from the chain rule on the evaluated (a, b, c); the series
/// value inside the bootstrap radius.
inline double second_derivative_c(const MetricProfile& profile, double r) {
  const auto s = profile.eval(r);
  if (r < profile.r0()) return s.ddc;
  return second_derivatives(s.a, s.b, s.c, rhs(s.a, s.b, s.c)).dc;
}

inline SignReport sign_report(const MetricProfile& profile, std::span<const double> grid,
                              double rel_tol = 1e-10) {
  SignReport rep;
  rep.a_concave = true;
  rep.b_concave = true;
  double prev_r = 0;
  double prev_c = profile.eval(0.0).ddc;  // 3/(4m) > 0 on the zero section
  std::optional<std::pair<double, double>> bracket;
  for (double r : grid) {
    const auto s = profile.eval(r);
    if (!(s.dda < 0)) rep.a_concave = false;
    if (!(s.ddb < 0)) rep.b_concave = false;
    const double cc = second_derivative_c(profile, r);
    if ((cc < 0) != (prev_c < 0)) {
      ++rep.c_sign_changes;
      if (!bracket) bracket = {prev_r, r};
    }
    prev_r = r;
    prev_c = cc;
  }
  if (bracket) {
    double lo = bracket->first, hi = bracket->second;
    const bool lo_positive = second_derivative_c(profile, lo) > 0;
    while (hi - lo > rel_tol * hi) {
      const double mid = 0.5 * (lo + hi);
      if ((second_derivative_c(profile, mid) > 0) == lo_positive)
        lo = mid;
      else
        hi = mid;
    }
    rep.c_crossing = 0.5 * (lo + hi);
  }
  return rep;
}

}  // namespace ahgeom
