#pragma once

// Coefficient functions a, b, c of the Atiyah-Hitchin metric
//
//   ds^2 = dr^2 + a^2 (s1)^2 + b^2 (s2)^2 + c^2 (s3)^2,
//
// solved from the singular start a(0) = 0, b(0) = -m, c(0) = m.  The series
// oracle covers [0, r0); an adaptive Dormand-Prince 5(4) integration covers
// [r0, r_max] and stores samples dense enough for cubic Hermite evaluation.

#include "ahgeom/dormand_prince.hpp"
#include "ahgeom/series.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ahgeom {

/// Raised when an operation is evaluated outside its domain (for example on
/// the singular locus abc = 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Integration failed; radius() is the last radius reached.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double radius)
      : std::runtime_error(what + " (r = " + std::to_string(radius) + ")"), radius_(radius) {}
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

struct ModelParams {
  double m = 1.0;       // radius of the zero-section sphere
  double r_max = 20.0;  // integration horizon
  double tol = 1e-10;   // local relative error tolerance

  static ModelParams with_scale(double m, double tol = 1e-10) { return {m, 20.0 * m, tol}; }

  void validate() const {
    if (!(m > 0) || !std::isfinite(m)) throw DomainError("m must be positive");
    if (!(r_max > 0) || !std::isfinite(r_max)) throw DomainError("r_max must be positive");
    if (!(tol > 0 && tol <= 1e-2)) throw DomainError("tol must lie in (0, 1e-2]");
  }
};

/// Local data of the metric at one radius.
struct CoefficientSample {
  double r = 0;
  double a = 0, b = 0, c = 0;
  double da = 0, db = 0, dc = 0;
  double dda = 0, ddb = 0, ddc = 0;
  // c - a, carried separately: at large r it drops far below the rounding
  // level of c itself, and x = a/c, 1 - x and the derivative chain need it.
  double gap = 0;
};

struct Derivatives {
  double da = 0, db = 0, dc = 0;
};

struct ApqDerivatives {
  double da = 0, dq = 0, dp = 0;
};

/// a' = (a^2 - (b-c)^2) / (2bc) and cyclic.
inline Derivatives rhs(double a, double b, double c) {
  if (a == 0 || b == 0 || c == 0)
    throw DomainError("rhs evaluated on the singular locus abc = 0; use the series bootstrap");
  return {(a * a - (b - c) * (b - c)) / (2 * b * c), (b * b - (c - a) * (c - a)) / (2 * c * a),
          (c * c - (a - b) * (a - b)) / (2 * a * b)};
}

/// The same system in a, p = c + b, q = c - b.
inline ApqDerivatives rhs_apq(double a, double p, double q) {
  if (a == 0) throw DomainError("rhs_apq requires a != 0");
  const double den = p * p - q * q;
  if (den == 0) throw DomainError("rhs_apq requires p^2 != q^2");
  return {2 * (a * a - q * q) / den, 2 * q * (p * p - a * a) / (a * den),
          2 + 2 * p * (q * q - a * a) / (a * den)};
}

/// (c - a)' / (c - a) = ((a + c)^2 - b^2) / (2abc), exact consequence of rhs.
inline double gap_rate(double a, double b, double c) {
  if (a == 0 || b == 0 || c == 0) throw DomainError("gap_rate requires abc != 0");
  return ((a + c) * (a + c) - b * b) / (2 * a * b * c);
}

namespace ode_detail {

// Partials of F(x, y, z) = (x^2 - (y - z)^2) / (2yz).
struct Partials {
  double fx, fy, fz;
};

inline Partials partials(double x, double y, double z) {
  const double f = (x * x - (y - z) * (y - z)) / (2 * y * z);
  return {x / (y * z), -(y - z) / (y * z) - f / y, (y - z) / (y * z) - f / z};
}

}  // namespace ode_detail

/// Second derivatives by the chain rule through rhs.
inline Derivatives second_derivatives(double a, double b, double c, const Derivatives& d) {
  if (a == 0 || b == 0 || c == 0) throw DomainError("second_derivatives requires abc != 0");
  using ode_detail::partials;
  const auto pa = partials(a, b, c);  // a' = F(a, b, c)
  const auto pb = partials(b, c, a);  // b' = F(b, c, a)
  const auto pc = partials(c, a, b);  // c' = F(c, a, b)
  return {pa.fx * d.da + pa.fy * d.db + pa.fz * d.dc,
          pb.fx * d.db + pb.fy * d.dc + pb.fz * d.da,
          pc.fx * d.dc + pc.fy * d.da + pc.fz * d.db};
}

/// Full sample from (a, b, c - a) with derivatives from rhs.
inline CoefficientSample sample_from_state(double r, double a, double b, double gap) {
  CoefficientSample s;
  s.r = r;
  s.a = a;
  s.b = b;
  s.gap = gap;
  s.c = a + gap;
  const auto d = rhs(s.a, s.b, s.c);
  const auto dd = second_derivatives(s.a, s.b, s.c, d);
  s.da = d.da;
  s.db = d.db;
  s.dc = d.dc;
  s.dda = dd.da;
  s.ddb = dd.db;
  s.ddc = dd.dc;
  return s;
}

/// Sample evaluated from the series, derivatives term by term.  Exact at r = 0.
inline CoefficientSample sample_from_series(const SeriesCoefficients& series, double r) {
  const auto v = evaluate(series, r);
  CoefficientSample s;
  s.r = r;
  s.a = v.a;
  s.b = 0.5 * (v.p - v.q);
  s.c = 0.5 * (v.p + v.q);
  s.da = v.da;
  s.db = 0.5 * (v.dp - v.dq);
  s.dc = 0.5 * (v.dp + v.dq);
  s.dda = v.dda;
  s.ddb = 0.5 * (v.ddp - v.ddq);
  s.ddc = 0.5 * (v.ddp + v.ddq);
  s.gap = s.c - s.a;
  return s;
}

inline constexpr int kDefaultSeriesOrder = 10;

/// Default bootstrap radius: last retained series term below tol / 10.
inline double default_bootstrap_radius(const SeriesCoefficients& series, double tol) {
  return bootstrap_radius(series, tol / 10);
}

/// Series sample at r0 for the given model.
inline CoefficientSample bootstrap(const ModelParams& params, int order, double r0) {
  params.validate();
  if (!(r0 > 0)) throw DomainError("bootstrap radius must be positive");
  return sample_from_series(expand(params.m, order), r0);
}

/// Shape coordinates x = a/c, y = b/c, plus 1 - x computed from c - a.
struct ShapePoint {
  double x = 0;
  double y = 0;
  double one_minus_x = 1;

  /// y < -1 + x, 0 < x < 1, -1 < y < 0.
  bool in_region() const {
    return x > 0 && one_minus_x > 0 && y > -1 && y < 0 && (-one_minus_x - y) > 0;
  }
};

inline ShapePoint shape(const CoefficientSample& s) {
  if (s.c == 0) throw DomainError("shape requires c != 0");
  return {s.a / s.c, s.b / s.c, s.gap / s.c};
}

namespace ode_detail {

struct Hermite {
  double h00, h10, h01, h11;     // value basis
  double dh00, dh10, dh01, dh11; // derivative basis (per unit t)
};

inline Hermite hermite_basis(double t) {
  const double t2 = t * t, t3 = t2 * t;
  return {2 * t3 - 3 * t2 + 1, t3 - 2 * t2 + t,  -2 * t3 + 3 * t2, t3 - t2,
          6 * t2 - 6 * t,      3 * t2 - 4 * t + 1, -6 * t2 + 6 * t, 3 * t2 - 2 * t};
}

inline double hermite_value(const Hermite& hb, double h, double y0, double m0, double y1,
                            double m1) {
  return hb.h00 * y0 + hb.h10 * h * m0 + hb.h01 * y1 + hb.h11 * h * m1;
}

inline double hermite_slope(const Hermite& hb, double h, double y0, double m0, double y1,
                            double m1) {
  return (hb.dh00 * y0 + hb.dh10 * h * m0 + hb.dh01 * y1 + hb.dh11 * h * m1) / h;
}

// Cubic Hermite interpolation between two stored samples.  Values of a, b and
// c - a come from (y, y'); first derivatives from (y', y''), and second
// derivatives from the slope of that second interpolant.
inline CoefficientSample interpolate(const CoefficientSample& lo, const CoefficientSample& hi,
                                     double r) {
  const double h = hi.r - lo.r;
  const auto hb = hermite_basis((r - lo.r) / h);
  CoefficientSample s;
  s.r = r;
  s.a = hermite_value(hb, h, lo.a, lo.da, hi.a, hi.da);
  s.b = hermite_value(hb, h, lo.b, lo.db, hi.b, hi.db);
  s.gap = hermite_value(hb, h, lo.gap, gap_rate(lo.a, lo.b, lo.c) * lo.gap, hi.gap,
                        gap_rate(hi.a, hi.b, hi.c) * hi.gap);
  s.c = s.a + s.gap;
  s.da = hermite_value(hb, h, lo.da, lo.dda, hi.da, hi.dda);
  s.db = hermite_value(hb, h, lo.db, lo.ddb, hi.db, hi.ddb);
  s.dc = hermite_value(hb, h, lo.dc, lo.ddc, hi.dc, hi.ddc);
  s.dda = hermite_slope(hb, h, lo.da, lo.dda, hi.da, hi.dda);
  s.ddb = hermite_slope(hb, h, lo.db, lo.ddb, hi.db, hi.ddb);
  s.ddc = hermite_slope(hb, h, lo.dc, lo.ddc, hi.dc, hi.ddc);
  return s;
}

}  // namespace ode_detail

/// The numerically constructed metric on [0, r_max].  Immutable once built.
class MetricProfile {
 public:
  MetricProfile(ModelParams params, SeriesCoefficients series, std::vector<CoefficientSample> samples)
      : params_(params), series_(std::move(series)), samples_(std::move(samples)) {
    if (samples_.size() < 2) throw DomainError("profile needs at least two samples");
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      if (!(samples_[i].r > samples_[i - 1].r))
        throw DomainError("profile radii must be strictly increasing");
    }
  }

  const ModelParams& params() const noexcept { return params_; }
  const SeriesCoefficients& series() const noexcept { return series_; }
  std::span<const CoefficientSample> samples() const noexcept { return samples_; }
  /// Radius where the series hands over to the integrated samples.
  double r0() const noexcept { return samples_.front().r; }
  double r_max() const noexcept { return samples_.back().r; }

  CoefficientSample eval(double r) const {
    if (!(r >= 0) || r > r_max() * (1 + 1e-14))
      throw DomainError("eval radius " + std::to_string(r) + " outside [0, r_max]");
    if (r < r0()) return sample_from_series(series_, r);
    r = std::min(r, r_max());
    auto it = std::lower_bound(samples_.begin(), samples_.end(), r,
                               [](const CoefficientSample& s, double v) { return s.r < v; });
    if (it->r == r) return *it;
    return ode_detail::interpolate(*(it - 1), *it, r);
  }

 private:
  ModelParams params_;
  SeriesCoefficients series_;
  std::vector<CoefficientSample> samples_;
};

struct IntegrateOptions {
  int series_order = kDefaultSeriesOrder;
  double r0 = 0;  // 0 selects default_bootstrap_radius
  std::size_t max_steps = 2'000'000;
};

namespace ode_detail {

using State = dopri::State<3>;  // (a, b, c - a)

inline State field(double /*r*/, const State& y) {
  const double a = y[0], b = y[1], gap = y[2];
  const double c = a + gap;
  const auto d = rhs(a, b, c);
  return {d.da, d.db, gap_rate(a, b, c) * gap};
}

inline bool signs_ok(const State& y) { return y[0] > 0 && y[1] < 0 && y[0] + y[2] > 0; }

// Discrepancy between the Hermite interpolant over [lo, hi] and an
// independently stepped midpoint sample, in units of the tolerance.
inline double interpolation_error(const CoefficientSample& lo, const CoefficientSample& hi,
                                  const CoefficientSample& mid, const ModelParams& p) {
  const auto s = interpolate(lo, hi, mid.r);
  auto val = [&](double got, double want) {
    return std::abs(got - want) / (p.tol * std::max(std::abs(want), p.m));
  };
  auto slope = [&](double got, double want) {
    return std::abs(got - want) / (p.tol * std::max(std::abs(want), 1.0));
  };
  double e = std::max({val(s.a, mid.a), val(s.b, mid.b), val(s.c, mid.c),
                       slope(s.da, mid.da), slope(s.db, mid.db), slope(s.dc, mid.dc)});
  e = std::max(e, std::abs(s.gap - mid.gap) / (p.tol * std::abs(mid.gap)));
  return e;
}

}  // namespace ode_detail

/// Integrates the coefficient system from the series bootstrap to r_max.
///
/// Accepted steps satisfy two conditions: the embedded local error estimate
/// is within tol (relative, floored at m for a and b; purely relative for
/// c - a), and the cubic Hermite interpolant over the step reproduces an
/// independent half-step state at the midpoint within tol.
inline MetricProfile integrate(const ModelParams& params, const IntegrateOptions& opt = {}) {
  params.validate();
  using ode_detail::State;
  auto series = expand(params.m, opt.series_order);
  const double r0 = opt.r0 > 0 ? opt.r0 : default_bootstrap_radius(series, params.tol);
  if (!(r0 < params.r_max)) throw DomainError("bootstrap radius must be below r_max");

  const auto start = sample_from_series(series, r0);
  std::vector<CoefficientSample> samples;
  samples.push_back(sample_from_state(r0, start.a, start.b, start.gap));

  State y{samples.back().a, samples.back().b, samples.back().gap};
  State k1 = ode_detail::field(r0, y);
  double r = r0;
  double h = std::min(0.01 * params.m, params.r_max - r0);
  const double h_min = 1e-12 * params.m;
  std::string last_reject = "none";

  auto error_norm = [&](const State& y0, const dopri::StepResult<3>& st) {
    double e = 0;
    for (std::size_t i = 0; i < 2; ++i) {
      const double sc = params.tol * std::max({std::abs(y0[i]), std::abs(st.y[i]), params.m});
      e = std::max(e, std::abs(st.error[i]) / sc);
    }
    const double sc_gap = params.tol * std::max(std::abs(y0[2]), std::abs(st.y[2]));
    return std::max(e, std::abs(st.error[2]) / std::max(sc_gap, std::numeric_limits<double>::min()));
  };

  for (std::size_t n = 0; r < params.r_max; ++n) {
    if (n >= opt.max_steps) throw IntegrationError("step budget exhausted", r);
    if (h < h_min)
      throw IntegrationError("step size underflow; last rejection: " + last_reject, r);
    double h_try = std::min(h, params.r_max - r);
    const bool last = (r + h_try >= params.r_max * (1 - 1e-15));
    const double r_new = last ? params.r_max : r + h_try;
    h_try = r_new - r;

    double factor = 0.2;
    try {
      const auto st = dopri::step<3>(ode_detail::field, r, y, k1, h_try);
      const double err = error_norm(y, st);
      if (!std::isfinite(err)) {
        last_reject = "non-finite error estimate";
      } else if (!ode_detail::signs_ok(st.y)) {
        last_reject = "sign invariant a > 0, b < 0, c > 0 breached";
      } else {
        double ierr = 0;
        CoefficientSample end;
        if (err <= 1) {
          end = sample_from_state(r_new, st.y[0], st.y[1], st.y[2]);
          const auto half = dopri::step<3>(ode_detail::field, r, y, k1, 0.5 * h_try);
          const auto mid = sample_from_state(r + 0.5 * h_try, half.y[0], half.y[1], half.y[2]);
          ierr = ode_detail::interpolation_error(samples.back(), end, mid, params);
        }
        const double f1 = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        const double f2 = ierr > 0 ? 0.9 * std::pow(ierr, -0.25) : 5.0;
        factor = std::clamp(std::min(f1, f2), 0.2, 5.0);
        if (err <= 1 && ierr <= 1) {
          samples.push_back(end);
          y = st.y;
          k1 = st.dydt;
          r = r_new;
          h = h_try * factor;
          continue;
        }
        last_reject = err > 1 ? "local error above tol" : "interpolation error above tol";
      }
    } catch (const DomainError& e) {
      last_reject = e.what();
    }
    h = h_try * factor;
  }
  return MetricProfile(params, std::move(series), std::move(samples));
}

/// Radii r_max * i / n for i = 1..n.
inline std::vector<double> uniform_grid(double r_max, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = r_max * static_cast<double>(i + 1) / static_cast<double>(n);
  return g;
}

/// Residuals of the product form (ca + ab)' = 2 (ca)(ab) / (abc) and cyclic.
inline std::array<double, 3> ode2_residual(const CoefficientSample& s) {
  const double abc = s.a * s.b * s.c;
  const double ca = s.c * s.a, ab = s.a * s.b, bc = s.b * s.c;
  const double d_ca = s.dc * s.a + s.c * s.da;
  const double d_ab = s.da * s.b + s.a * s.db;
  const double d_bc = s.db * s.c + s.b * s.dc;
  return {d_ca + d_ab - 2 * ca * ab / abc, d_ab + d_bc - 2 * ab * bc / abc,
          d_bc + d_ca - 2 * bc * ca / abc};
}

/// Largest product-form residual over the grid.
inline double check_ode2(const MetricProfile& profile, std::span<const double> grid) {
  double worst = 0;
  for (double r : grid) {
    const auto res = ode2_residual(profile.eval(r));
    for (double v : res) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

}  // namespace ahgeom
