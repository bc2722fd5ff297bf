#pragma once

// Full verification suite behind `ahgeom verify`.  Each check produces one
// record; the report passes iff every record passes.

#include "ahgeom/convexity.hpp"
#include "ahgeom/curvature.hpp"
#include "ahgeom/ode.hpp"
#include "ahgeom/series.hpp"
#include "ahgeom/sigma.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace ahgeom {

enum class OutputFormat { csv, json };

struct RunConfig {
  double m = 1.0;
  std::optional<double> r_max;  // defaults to 20 m
  double tol = 1e-10;
  long grid_points = 1000;
  std::optional<std::uint64_t> seed;
  OutputFormat format = OutputFormat::csv;
  std::string output;  // empty: stdout

  static constexpr std::uint64_t kDefaultSeed = 20180601;

  ModelParams params() const { return {m, r_max.value_or(20.0 * m), tol}; }
  std::uint64_t rng_seed() const { return seed.value_or(kDefaultSeed); }

  void validate() const {
    params().validate();
    if (grid_points < 2) throw DomainError("grid must have at least 2 points");
  }
};

// Thresholds of the suite.
namespace thresholds {
inline constexpr double ode_stored = 1e-9;        // ODE residual on stored samples, relative
inline constexpr double ode2_interpolated = 1e-6; // product form at interpolated midpoints
inline constexpr double asd_stored = 1e-9;
inline constexpr double cyclic_sum = 1e-12;       // relative to max |k_i|
inline constexpr double kappa_vs_second = 1e-6;   // |a''/a - kappa| / max(1, |kappa|)
inline constexpr double stability = 1e-12;        // relative to 1/m^2
inline constexpr double calibration_slack = 1e-8;
inline constexpr double plane_oracle = 1e-3;
inline constexpr double plane_undercut = 1e-8;
inline constexpr long plane_trials = 100000;
inline constexpr int plane_radii = 10;
inline constexpr double bisection = 1e-10;
inline constexpr double scale_covariance = 1e-8;
inline constexpr int scale_radii = 100;
inline constexpr double limit_curvature = 1e-3;   // fiber curvature at r = 1e-4 m
}  // namespace thresholds

struct CheckRecord {
  std::string check;
  std::string anchor;
  bool passed = false;
  double margin = 0;  // worst residual (lower is better) or worst margin (higher is better)
  long grid = 0;
  std::string detail;
};

struct VerificationReport {
  RunConfig config;
  std::vector<CheckRecord> checks;
  nlohmann::json observations = nlohmann::json::object();

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  const CheckRecord* first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }
};

/// Names of every check, in report order.
inline const std::array<const char*, 12>& check_names() {
  static const std::array<const char*, 12> names{
      "ode_residual",        "series_coefficients",   "shape_region",
      "hyperkahler_certificate", "strong_stability",  "calibration_bc_bound",
      "derivative_chain",    "two_convexity",         "plane_trace_oracle",
      "second_derivative_signs", "scale_covariance",  "sigma_limits"};
  return names;
}

namespace verify_detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline std::vector<double> midpoints(const MetricProfile& p) {
  std::vector<double> out;
  const auto s = p.samples();
  out.reserve(s.size());
  for (std::size_t i = 1; i < s.size(); ++i) out.push_back(0.5 * (s[i - 1].r + s[i].r));
  return out;
}

inline double rel_ode_residual(const CoefficientSample& s) {
  const auto d = rhs(s.a, s.b, s.c);
  auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(got)); };
  return std::max({rel(s.da, d.da), rel(s.db, d.db), rel(s.dc, d.dc)});
}

inline CheckRecord ode_residual(const MetricProfile& p) {
  double stored = 0;
  for (const auto& s : p.samples()) stored = std::max(stored, rel_ode_residual(s));
  const auto mids = midpoints(p);
  const double ode2 = check_ode2(p, mids);
  CheckRecord c{"ode_residual", "coefficient ODE and its product form (ca+ab)' = 2(ca)(ab)/(abc)",
                stored <= thresholds::ode_stored && ode2 <= thresholds::ode2_interpolated,
                std::max(stored, ode2), static_cast<long>(p.samples().size()), ""};
  c.detail = "stored residual " + sci(stored) + ", product form at " +
             std::to_string(mids.size()) + " midpoints " + sci(ode2);
  return c;
}

inline CheckRecord series_coefficients(double m) {
  const auto s = expand(m, kDefaultSeriesOrder);
  auto b = [&](int k) { return (s.coeff_p[k] - s.coeff_q[k]) / 2; };
  auto c = [&](int k) { return (s.coeff_p[k] + s.coeff_q[k]) / 2; };
  const bool printed = s.coeff_a[0] == 0 && s.coeff_a[1] == 2 && s.coeff_a[2] == 0 &&
                       s.coeff_a[3] == Rational(-1, 2) && b(0) == -1 && b(1) == Rational(1, 2) &&
                       b(2) == Rational(-3, 8) && c(0) == 1 && c(1) == Rational(1, 2) &&
                       c(2) == Rational(3, 8);
  const bool parity = has_parity(s);
  const bool exact = residual(s);
  CheckRecord rec{"series_coefficients",
                  "a = 2r - r^3/(2m^2), b = -m + r/2 - 3r^2/(8m), c = m + r/2 + 3r^2/(8m); a, p odd, q even",
                  printed && parity && exact, 0.0, kDefaultSeriesOrder, ""};
  rec.detail = std::string("printed terms ") + (printed ? "match" : "differ") + ", parity " +
               (parity ? "holds" : "fails") + ", cleared identities " + (exact ? "exact" : "violated");
  return rec;
}

inline CheckRecord shape_region(const MetricProfile& p, std::span<const double> grid) {
  long bad = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (double r : grid) {
    const auto sh = shape(p.eval(r));
    if (!sh.in_region()) ++bad;
    worst = std::min({worst, sh.x, sh.one_minus_x, sh.y + 1, -sh.y, -sh.one_minus_x - sh.y});
  }
  return {"shape_region", "(x, y) = (a/c, b/c) obeys y < -1 + x, 0 < x < 1, -1 < y < 0", bad == 0, worst,
          static_cast<long>(grid.size()), std::to_string(bad) + " grid points outside the region"};
}

inline CheckRecord hyperkahler(const MetricProfile& p, std::span<const double> grid) {
  double asd = 0;
  double cyclic = 0;
  double mismatch = 0;
  for (const auto& s : p.samples()) {
    for (double e : asd_residual(s)) asd = std::max(asd, std::abs(e));
    const auto k = curvature_components(s);
    cyclic = std::max(cyclic, std::abs(k.cyclic_sum()) / k.scale());
    mismatch = std::max(mismatch, second_derivative_mismatch(s));
  }
  for (double r : grid) {
    const auto s = p.eval(r);
    const auto k = curvature_components(s);
    cyclic = std::max(cyclic, std::abs(k.cyclic_sum()) / k.scale());
    mismatch = std::max(mismatch, second_derivative_mismatch(s));
  }
  const bool ok = asd <= thresholds::asd_stored && cyclic <= thresholds::cyclic_sum &&
                  mismatch <= thresholds::kappa_vs_second;
  return {"hyperkahler_certificate",
          "w0^i + wj^k = -s^i; k1 + k2 + k3 = 0; a''/a = kappa(a,b,c)",
          ok,
          std::max({asd / thresholds::asd_stored, cyclic / thresholds::cyclic_sum,
                    mismatch / thresholds::kappa_vs_second}),
          static_cast<long>(grid.size()),
          "asd " + sci(asd) + ", cyclic/scale " + sci(cyclic) +
              ", |a''/a - kappa| " + sci(mismatch)};
}

inline CheckRecord strong_stability() {
  double worst = 0;
  double min_eig = std::numeric_limits<double>::infinity();
  for (double m : {0.5, 1.0, 2.0, 10.0}) {
    const auto op = stability_operator(m);
    const double unit = 1.0 / (m * m);
    const double dev = (op - unit * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() / unit;
    worst = std::max(worst, dev);
    min_eig = std::min(min_eig, stability_eigenvalues(op).minCoeff() / unit);
  }
  return {"strong_stability", "R - A = (1/m^2) I on the normal bundle of the zero section",
          worst <= thresholds::stability && min_eig > 0, worst, 4,
          "max relative deviation from I/m^2 " + sci(worst)};
}

inline CheckRecord calibration(const MetricProfile& p, std::span<const double> grid) {
  std::vector<double> g{0.0};
  g.insert(g.end(), grid.begin(), grid.end());
  const auto res = calibration_check(p, g);
  const double m2 = p.params().m * p.params().m;
  const bool ok = res.bound_holds && res.monotone && std::abs(res.min_abs_bc - m2) <= 1e-15 * m2;
  return {"calibration_bc_bound", "bc <= -m^2, equality only on the zero section, bc decreasing",
          ok, res.worst_margin, static_cast<long>(g.size()),
          std::string("min |bc| = ") + sci(res.min_abs_bc) +
              (res.monotone ? ", strictly decreasing" : ", NOT monotone")};
}

inline CheckRecord derivative_chain(const MetricProfile& p, std::span<const double> grid) {
  const auto w = chain_check(p, grid);
  const double worst = *std::min_element(w.begin(), w.end());
  char buf[160];
  std::snprintf(buf, sizeof buf, "margins %.3e %.3e %.3e %.3e", w[0], w[1], w[2], w[3]);
  return {"derivative_chain", "1 > r a'/a > r c'/c > -r b'/b > 0", worst > 0, worst,
          static_cast<long>(grid.size()), buf};
}

inline CheckRecord two_convexity(const MetricProfile& p, std::span<const double> grid) {
  double worst2 = std::numeric_limits<double>::infinity();
  double worst3 = std::numeric_limits<double>::infinity();
  double largest1 = -std::numeric_limits<double>::infinity();
  for (double r : grid) {
    const auto h = hessian_r2(p.eval(r));
    worst2 = std::min(worst2, min_trace_over_kplanes(h, 2));
    worst3 = std::min(worst3, min_trace_over_kplanes(h, 3));
    largest1 = std::max(largest1, min_trace_over_kplanes(h, 1));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "min 2-sum %.3e, min 3-sum %.3e, max smallest eigenvalue %.3e",
                worst2, worst3, largest1);
  return {"two_convexity", "Hess(r^2): two smallest eigenvalues sum > 0, smallest < 0",
          worst2 > 0 && worst3 > 0 && largest1 < 0, worst2, static_cast<long>(grid.size()), buf};
}

inline CheckRecord plane_oracle(const MetricProfile& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_gap = 0;
  double worst_undercut = 0;
  for (int i = 0; i < thresholds::plane_radii; ++i) {
    const double r = p.r_max() * (1.0 - unif(rng));  // in (0, r_max]
    const auto s = p.eval(r);
    const auto h = hessian_r2(s);
    for (int k = 1; k <= 3; ++k) {
      const double exact = min_trace_over_kplanes(h, k);
      const double found = brute_force_plane_min(s, k, thresholds::plane_trials, rng());
      worst_gap = std::max(worst_gap, std::abs(found - exact));
      worst_undercut = std::max(worst_undercut, exact - found);
    }
  }
  return {"plane_trace_oracle", "min over k-planes of tr_L Q equals the sum of the k smallest eigenvalues",
          worst_gap <= thresholds::plane_oracle && worst_undercut <= thresholds::plane_undercut,
          worst_gap, thresholds::plane_radii,
          "worst |random search - eigenvalue sum| " + sci(worst_gap)};
}

inline CheckRecord second_derivative_signs(const MetricProfile& p, std::span<const double> grid,
                                           nlohmann::json& obs) {
  const auto rep = sign_report(p, grid, thresholds::bisection);
  const bool ok = rep.a_concave && rep.b_concave && rep.c_sign_changes == 1 && rep.c_crossing;
  if (rep.c_crossing) obs["c_second_derivative_zero"] = *rep.c_crossing;
  return {"second_derivative_signs", "a'' < 0, b'' < 0 for r > 0; c'' changes sign once",
          ok, rep.c_crossing.value_or(-1.0), static_cast<long>(grid.size()),
          std::string(rep.a_concave ? "a''<0" : "a'' sign FAIL") + ", " +
              (rep.b_concave ? "b''<0" : "b'' sign FAIL") + ", c'' sign changes " +
              std::to_string(rep.c_sign_changes)};
}

inline CheckRecord scale_covariance(const MetricProfile& p) {
  const auto& pp = p.params();
  const auto doubled = integrate({2 * pp.m, 2 * pp.r_max, pp.tol});
  double worst = 0;
  for (int i = 1; i <= thresholds::scale_radii; ++i) {
    const double r = pp.r_max * i / thresholds::scale_radii;
    const auto s1 = p.eval(r);
    const auto s2 = doubled.eval(2 * r);
    auto rel = [](double big, double small) { return std::abs(big - 2 * small) / std::abs(2 * small); };
    worst = std::max({worst, rel(s2.a, s1.a), rel(s2.b, s1.b), rel(s2.c, s1.c)});
  }
  return {"scale_covariance", "a_{2m}(r) = 2 a_m(r/2), same for b, c",
          worst <= thresholds::scale_covariance, worst, thresholds::scale_radii,
          "worst relative deviation " + sci(worst)};
}

inline CheckRecord sigma_limits(const MetricProfile& p) {
  const double m = p.params().m;
  const auto s = p.eval(0.0);
  const bool values = s.a == 0 && s.b == -m && s.c == m && s.da == 2 && s.db == 0.5 && s.dc == 0.5 &&
                      s.dda == 0 && std::abs(s.ddb + 3 / (4 * m)) <= 1e-15 / m &&
                      std::abs(s.ddc - 3 / (4 * m)) <= 1e-15 / m;
  const double k0 = fiber_gauss_curvature(s);
  const double expect = 3 / (2 * m * m);
  const double near = fiber_gauss_curvature(p.eval(1e-4 * m));
  const double dev = std::abs(near - expect) / expect;
  const bool ok = values && std::abs(k0 - expect) <= 1e-15 * expect && dev <= thresholds::limit_curvature;
  return {"sigma_limits", "(a,b,c) -> (0,-m,m), derivatives (2,1/2,1/2), K_fiber -> 3/(2m^2)",
          ok, dev, 2,
          std::string("r = 0 data ") + (values ? "exact" : "WRONG") +
              ", fiber curvature at 1e-4 m off by " + sci(dev)};
}

}  // namespace verify_detail

inline VerificationReport run_verification(const RunConfig& config) {
  config.validate();
  VerificationReport rep;
  rep.config = config;
  const auto profile = integrate(config.params());
  const auto grid = uniform_grid(profile.r_max(), static_cast<std::size_t>(config.grid_points));
  using namespace verify_detail;
  rep.checks.push_back(ode_residual(profile));
  rep.checks.push_back(series_coefficients(config.m));
  rep.checks.push_back(shape_region(profile, grid));
  rep.checks.push_back(hyperkahler(profile, grid));
  rep.checks.push_back(strong_stability());
  rep.checks.push_back(calibration(profile, grid));
  rep.checks.push_back(derivative_chain(profile, grid));
  rep.checks.push_back(two_convexity(profile, grid));
  rep.checks.push_back(plane_oracle(profile, config.rng_seed()));
  rep.checks.push_back(second_derivative_signs(profile, grid, rep.observations));
  rep.checks.push_back(scale_covariance(profile));
  rep.checks.push_back(sigma_limits(profile));

  // Empirical constant in tr_L Hess(r^2) >= delta r^2 near the zero section.
  double delta = std::numeric_limits<double>::infinity();
  for (double r : grid) {
    if (r > 0.1 * config.m) break;
    delta = std::min(delta, hessian_r2(profile.eval(r)).min2sum / (r * r));
  }
  if (std::isfinite(delta)) rep.observations["two_convexity_delta_near_zero"] = delta;
  rep.observations["bootstrap_radius"] = profile.r0();
  rep.observations["stored_samples"] = profile.samples().size();
  return rep;
}

inline nlohmann::json to_json(const VerificationReport& rep) {
  nlohmann::json j;
  const auto& c = rep.config;
  j["config"] = {{"m", c.m},
                 {"r_max", c.params().r_max},
                 {"tol", c.tol},
                 {"grid", c.grid_points},
                 {"seed", c.rng_seed()}};
  j["tolerances"] = {{"ode_stored", thresholds::ode_stored},
                     {"ode2_interpolated", thresholds::ode2_interpolated},
                     {"asd_stored", thresholds::asd_stored},
                     {"cyclic_sum", thresholds::cyclic_sum},
                     {"kappa_vs_second_derivative", thresholds::kappa_vs_second},
                     {"stability", thresholds::stability},
                     {"calibration_slack", thresholds::calibration_slack},
                     {"plane_oracle", thresholds::plane_oracle},
                     {"plane_trials", thresholds::plane_trials},
                     {"bisection", thresholds::bisection},
                     {"scale_covariance", thresholds::scale_covariance}};
  j["checks"] = nlohmann::json::array();
  for (const auto& rec : rep.checks) {
    j["checks"].push_back({{"check", rec.check},
                           {"anchor", rec.anchor},
                           {"status", rec.passed ? "pass" : "fail"},
                           {"margin", rec.margin},
                           {"grid", rec.grid},
                           {"detail", rec.detail}});
  }
  j["observations"] = rep.observations;
  j["passed"] = rep.passed();
  return j;
}

}  // namespace ahgeom
