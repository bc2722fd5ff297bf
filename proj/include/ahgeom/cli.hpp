#pragma once

// Table output and the three commands behind the ahgeom executable.  Commands
// write to caller-supplied streams and return the process exit status.

#include "ahgeom/curvature.hpp"
#include "ahgeom/ode.hpp"
#include "ahgeom/verify.hpp"

#include "json.hpp"

#include <array>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ahgeom {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verification_failed = 1;
inline constexpr int usage = 2;
inline constexpr int numerical = 3;
}  // namespace exit_code

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline const std::vector<std::string>& profile_columns() {
  static const std::vector<std::string> cols{"r",   "a",   "b",   "c",   "da", "db",
                                             "dc",  "dda", "ddb", "ddc", "x",  "y"};
  return cols;
}

inline const std::vector<std::string>& curvature_columns() {
  static const std::vector<std::string> cols{"r", "k1", "k2", "k3", "asd1", "asd2", "asd3", "Kfiber"};
  return cols;
}

inline std::string format_number(double v) {
  if (v == 0) v = 0.0;  // no "-0" in tables
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

inline nlohmann::json params_json(const RunConfig& c) {
  return {{"m", c.m},
          {"r_max", c.params().r_max},
          {"tol", c.tol},
          {"grid", c.grid_points},
          {"seed", c.rng_seed()}};
}

inline void write_json(std::ostream& out, const RunConfig& c, const Table& t) {
  nlohmann::json j;
  j["params"] = params_json(c);
  j["columns"] = t.columns;
  j["samples"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json rec = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) rec[t.columns[i]] = row[i] == 0 ? 0.0 : row[i];
    j["samples"].push_back(std::move(rec));
  }
  out << j.dump(2) << '\n';
}

inline void write_table(std::ostream& out, const RunConfig& c, const Table& t) {
  if (c.format == OutputFormat::csv)
    write_csv(out, t);
  else
    write_json(out, c, t);
}

/// r = 0 followed by the uniform grid.
inline std::vector<double> output_radii(const MetricProfile& p, const RunConfig& c) {
  std::vector<double> rs{0.0};
  const auto g = uniform_grid(p.r_max(), static_cast<std::size_t>(c.grid_points));
  rs.insert(rs.end(), g.begin(), g.end());
  return rs;
}

inline Table profile_table(const MetricProfile& p, const RunConfig& c) {
  Table t{profile_columns(), {}};
  for (double r : output_radii(p, c)) {
    const auto s = p.eval(r);
    const auto sh = shape(s);
    t.rows.push_back({s.r, s.a, s.b, s.c, s.da, s.db, s.dc, s.dda, s.ddb, s.ddc, sh.x, sh.y});
  }
  return t;
}

inline Table curvature_table(const MetricProfile& p, const RunConfig& c) {
  Table t{curvature_columns(), {}};
  for (double r : output_radii(p, c)) {
    const auto s = p.eval(r);
    if (r == 0) {
      // The ASD residuals extend continuously to the zero section with value 0.
      const auto k = kappa_at_zero(c.m);
      t.rows.push_back({0.0, k.k1, k.k2, k.k3, 0.0, 0.0, 0.0, fiber_gauss_curvature(s)});
      continue;
    }
    const auto k = curvature_components(s);
    const auto e = asd_residual(s);
    t.rows.push_back({r, k.k1, k.k2, k.k3, e[0], e[1], e[2], fiber_gauss_curvature(s)});
  }
  return t;
}

namespace cli_detail {

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const IntegrationError& e) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", e.radius());
    err << "error: integration failed at r = " << buf << ": " << e.what() << '\n';
    return exit_code::numerical;
  } catch (const SeriesError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::numerical;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  }
}

}  // namespace cli_detail

inline int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return cli_detail::guarded(err, [&] {
    config.validate();
    const auto profile = integrate(config.params());
    write_table(out, config, profile_table(profile, config));
    return exit_code::ok;
  });
}

inline int cmd_curvature(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return cli_detail::guarded(err, [&] {
    config.validate();
    const auto profile = integrate(config.params());
    write_table(out, config, curvature_table(profile, config));
    return exit_code::ok;
  });
}

/// The report is always JSON; --format does not apply.
inline int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return cli_detail::guarded(err, [&] {
    const auto report = run_verification(config);
    out << to_json(report).dump(2) << '\n';
    if (const auto* f = report.first_failure()) {
      err << "verification failed: " << f->check << " (" << f->detail << ")\n";
      return exit_code::verification_failed;
    }
    return exit_code::ok;
  });
}

}  // namespace ahgeom
