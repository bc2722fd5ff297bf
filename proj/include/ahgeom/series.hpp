#pragma once

// Exact power-series solution of the Atiyah-Hitchin coefficient system about
// the zero section r = 0, in the variables a, p = c + b, q = c - b.
//
// All arithmetic here is exact rational.  The series is solved once for the
// unit scale m = 1; the coefficient of r^k for general m is the unit value
// times m^(1-k), which follows from the scaling symmetry a_m(r) = m a_1(r/m).

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ahgeom {

using Rational = boost::multiprecision::cpp_rational;
using RationalSeries = std::vector<Rational>;

class SeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truncated series a(r), p(r), q(r) through r^order.
///
/// coeff_* hold the unit-scale rationals; the physical coefficient of r^k is
/// coeff_*[k] * m^(1-k).
struct SeriesCoefficients {
  double m = 1.0;
  int order = 0;
  RationalSeries coeff_a;
  RationalSeries coeff_p;
  RationalSeries coeff_q;

  double a_coeff(int k) const { return scaled(coeff_a, k); }
  double p_coeff(int k) const { return scaled(coeff_p, k); }
  double q_coeff(int k) const { return scaled(coeff_q, k); }

 private:
  double scaled(const RationalSeries& c, int k) const {
    return static_cast<double>(c.at(static_cast<std::size_t>(k))) *
           std::pow(m, 1 - k);
  }
};

/// Value plus first and second r-derivatives of a, p, q at one radius.
struct SeriesValue {
  double a = 0, p = 0, q = 0;
  double da = 0, dp = 0, dq = 0;
  double dda = 0, ddp = 0, ddq = 0;
};

namespace series_detail {

inline RationalSeries multiply(const RationalSeries& x, const RationalSeries& y,
                               std::size_t n) {
  RationalSeries out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Rational s = 0;
    for (std::size_t i = 0; i <= k; ++i) {
      if (i < x.size() && k - i < y.size()) s += x[i] * y[k - i];
    }
    out[k] = s;
  }
  return out;
}

inline RationalSeries derivative(const RationalSeries& x, std::size_t n) {
  RationalSeries out(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k + 1 < x.size()) out[k] = x[k + 1] * Rational(k + 1);
  }
  return out;
}

inline RationalSeries subtract(const RationalSeries& x, const RationalSeries& y) {
  RationalSeries out(x);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= y[k];
  return out;
}

}  // namespace series_detail

/// Coefficients of the three cleared-denominator identities
///
///   F1 = a' (p^2 - q^2) - 2 (a^2 - q^2)
///   F2 = q' a (p^2 - q^2) - 2 q (p^2 - a^2)
///   F3 = (p' - 2) a (p^2 - q^2) + 2 p (a^2 - q^2)
///
/// through r^(n-1).  A formal solution makes all three vanish identically.
struct ClearedResidual {
  RationalSeries f1, f2, f3;
};

inline ClearedResidual cleared_residual(const RationalSeries& a,
                                        const RationalSeries& p,
                                        const RationalSeries& q, std::size_t n) {
  using namespace series_detail;
  const auto pp = multiply(p, p, n);
  const auto qq = multiply(q, q, n);
  const auto aa = multiply(a, a, n);
  const auto p2_q2 = subtract(pp, qq);
  const auto a2_q2 = subtract(aa, qq);
  const auto p2_a2 = subtract(pp, aa);
  const auto a_p2_q2 = multiply(a, p2_q2, n);

  ClearedResidual r;
  r.f1 = subtract(multiply(derivative(a, n), p2_q2, n), a2_q2);
  r.f1 = subtract(r.f1, a2_q2);

  r.f2 = subtract(multiply(derivative(q, n), a_p2_q2, n), multiply(q, p2_a2, n));
  r.f2 = subtract(r.f2, multiply(q, p2_a2, n));

  auto dp_minus_two = derivative(p, n);
  if (n > 0) dp_minus_two[0] -= 2;
  const auto p_a2_q2 = multiply(p, a2_q2, n);
  r.f3 = multiply(dp_minus_two, a_p2_q2, n);
  for (std::size_t k = 0; k < n; ++k) r.f3[k] += 2 * p_a2_q2[k];
  return r;
}

namespace series_detail {

// Solves the 3x3 system A x = rhs exactly; throws on a singular matrix.
inline std::array<Rational, 3> solve3(std::array<std::array<Rational, 3>, 3> A,
                                      std::array<Rational, 3> rhs) {
  for (int col = 0; col < 3; ++col) {
    int pivot = -1;
    for (int row = col; row < 3; ++row) {
      if (A[row][col] != 0) {
        pivot = row;
        break;
      }
    }
    if (pivot < 0) throw SeriesError("degenerate linear system in series recurrence");
    std::swap(A[col], A[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int row = 0; row < 3; ++row) {
      if (row == col || A[row][col] == 0) continue;
      const Rational f = A[row][col] / A[col][col];
      for (int j = col; j < 3; ++j) A[row][j] -= f * A[col][j];
      rhs[row] -= f * rhs[col];
    }
  }
  return {rhs[0] / A[0][0], rhs[1] / A[1][1], rhs[2] / A[2][2]};
}

}  // namespace series_detail

/// Raw series for an exact rational scale m, through r^order.
///
/// Leading data a_1 = 2, p_1 = 1, q_0 = 2m.  For each odd k >= 3 the unknowns
/// (a_k, q_{k-1}, p_k) enter the residual coefficients (F1 at r^(k-1),
/// F2 at r^(k-1), F3 at r^k) affinely, so the linear map is recovered exactly
/// by probing unit values and then inverted.  Even a-, p- and odd
/// q-coefficients are never assigned, which is where the parity comes from.
struct RawSeries {
  RationalSeries a, p, q;
};

inline RawSeries solve_recurrence(const Rational& m, int order) {
  if (order < 4) throw SeriesError("series order must be >= 4, got " + std::to_string(order));
  if (m <= 0) throw SeriesError("series scale m must be positive");

  // Work one order past the request so q_order is determined when order is even.
  const std::size_t len = static_cast<std::size_t>(order) + 3;
  RawSeries s{RationalSeries(len), RationalSeries(len), RationalSeries(len)};
  s.a[1] = 2;
  s.p[1] = 1;
  s.q[0] = 2 * m;

  for (std::size_t k = 3; k <= static_cast<std::size_t>(order) + 1; k += 2) {
    auto eval = [&](const Rational& ak, const Rational& qk, const Rational& pk) {
      s.a[k] = ak;
      s.q[k - 1] = qk;
      s.p[k] = pk;
      const auto r = cleared_residual(s.a, s.p, s.q, k + 1);
      return std::array<Rational, 3>{r.f1[k - 1], r.f2[k - 1], r.f3[k]};
    };
    const auto base = eval(0, 0, 0);
    const std::array<std::array<Rational, 3>, 3> probes{
        eval(1, 0, 0), eval(0, 1, 0), eval(0, 0, 1)};
    std::array<std::array<Rational, 3>, 3> jac;
    for (int row = 0; row < 3; ++row)
      for (int col = 0; col < 3; ++col) jac[row][col] = probes[col][row] - base[row];
    const auto x = series_detail::solve3(jac, {-base[0], -base[1], -base[2]});
    s.a[k] = x[0];
    s.q[k - 1] = x[1];
    s.p[k] = x[2];
  }

  const std::size_t keep = static_cast<std::size_t>(order) + 1;
  s.a.resize(keep);
  s.p.resize(keep);
  s.q.resize(keep);
  return s;
}

/// Series for scale m through r^order (order >= 4).
inline SeriesCoefficients expand(double m, int order) {
  if (!(m > 0) || !std::isfinite(m)) throw SeriesError("series scale m must be positive");
  auto raw = solve_recurrence(Rational(1), order);
  SeriesCoefficients out;
  out.m = m;
  out.order = order;
  out.coeff_a = std::move(raw.a);
  out.coeff_p = std::move(raw.p);
  out.coeff_q = std::move(raw.q);
  return out;
}

/// Physical coefficients for an exact rational m: unit value times m^(1-k).
inline RawSeries scaled_coefficients(const SeriesCoefficients& s, const Rational& m) {
  RawSeries out{s.coeff_a, s.coeff_p, s.coeff_q};
  Rational scale = m;  // m^(1-k) at k = 0
  for (std::size_t k = 0; k < out.a.size(); ++k) {
    out.a[k] *= scale;
    out.p[k] *= scale;
    out.q[k] *= scale;
    scale /= m;
  }
  return out;
}

/// True iff the stored coefficients satisfy all three cleared identities
/// exactly through r^(order-1).
inline bool residual(const SeriesCoefficients& s) {
  const auto n = static_cast<std::size_t>(s.order);
  if (s.coeff_a.size() != n + 1 || s.coeff_p.size() != n + 1 || s.coeff_q.size() != n + 1)
    return false;
  const auto r = cleared_residual(s.coeff_a, s.coeff_p, s.coeff_q, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (r.f1[k] != 0 || r.f2[k] != 0 || r.f3[k] != 0) return false;
  }
  return true;
}

/// True iff a and p are odd and q is even in r.
inline bool has_parity(const SeriesCoefficients& s) {
  for (std::size_t k = 0; k < s.coeff_a.size(); ++k) {
    if (k % 2 == 0 && (s.coeff_a[k] != 0 || s.coeff_p[k] != 0)) return false;
    if (k % 2 == 1 && s.coeff_q[k] != 0) return false;
  }
  return true;
}

/// Evaluates a, p, q and their first two derivatives term by term.
inline SeriesValue evaluate(const SeriesCoefficients& s, double r) {
  SeriesValue v;
  const double m = s.m;
  // Powers of r/m keep every term O(1) in the scale.
  const double t = r / m;
  double tk = 1.0;     // t^k
  double tkm1 = 0.0;   // t^(k-1)
  double tkm2 = 0.0;   // t^(k-2)
  for (int k = 0; k <= s.order; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const double ca = static_cast<double>(s.coeff_a[idx]);
    const double cp = static_cast<double>(s.coeff_p[idx]);
    const double cq = static_cast<double>(s.coeff_q[idx]);
    // coeff * m^(1-k) * r^k = m * coeff * t^k
    v.a += m * ca * tk;
    v.p += m * cp * tk;
    v.q += m * cq * tk;
    if (k >= 1) {
      v.da += k * ca * tkm1;
      v.dp += k * cp * tkm1;
      v.dq += k * cq * tkm1;
    }
    if (k >= 2) {
      const double f = static_cast<double>(k * (k - 1)) / m;
      v.dda += f * ca * tkm2;
      v.ddp += f * cp * tkm2;
      v.ddq += f * cq * tkm2;
    }
    tkm2 = tkm1;
    tkm1 = tk;
    tk *= t;
  }
  return v;
}

/// Magnitude of the last retained nonzero term of a/r, p/r and q/m at r,
/// used as the (heuristic) truncation bound.
inline double truncation_bound(const SeriesCoefficients& s, double r) {
  const double t = r / s.m;
  double bound = 0.0;
  auto last_nonzero = [](const RationalSeries& c) {
    for (std::size_t k = c.size(); k-- > 0;)
      if (c[k] != 0) return static_cast<int>(k);
    return 0;
  };
  const int ka = last_nonzero(s.coeff_a);
  const int kp = last_nonzero(s.coeff_p);
  const int kq = last_nonzero(s.coeff_q);
  bound = std::max(bound, std::abs(static_cast<double>(s.coeff_a[ka])) * std::pow(t, ka - 1));
  bound = std::max(bound, std::abs(static_cast<double>(s.coeff_p[kp])) * std::pow(t, kp - 1));
  bound = std::max(bound, std::abs(static_cast<double>(s.coeff_q[kq])) * std::pow(t, kq));
  return bound;
}

/// Largest r at which truncation_bound(s, r) <= threshold.
inline double bootstrap_radius(const SeriesCoefficients& s, double threshold) {
  // Each retained term is a monomial in t = r/m, so solve each one directly.
  double t_best = std::numeric_limits<double>::infinity();
  auto limit = [&](const RationalSeries& c, int shift) {
    for (std::size_t k = c.size(); k-- > 0;) {
      if (c[k] == 0) continue;
      const int power = static_cast<int>(k) - shift;
      if (power <= 0) return;
      const double mag = std::abs(static_cast<double>(c[k]));
      t_best = std::min(t_best, std::pow(threshold / mag, 1.0 / power));
      return;
    }
  };
  limit(s.coeff_a, 1);
  limit(s.coeff_p, 1);
  limit(s.coeff_q, 0);
  return t_best * s.m;
}

}  // namespace ahgeom
