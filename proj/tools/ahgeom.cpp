// ahgeom: solve, tabulate curvature, and verify the Atiyah-Hitchin metric.

#include "ahgeom/cli.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <string>

namespace {

enum class Command { none, solve, verify, curvature };

}  // namespace

int main(int argc, char** argv) {
  ahgeom::RunConfig config;
  double r_max = 0;
  std::uint64_t seed = 0;
  std::string format = "csv";
  Command command = Command::none;

  CLI::App app{"Numerical Atiyah-Hitchin metric and its geometric certificates"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file mirroring the flags");
  app.add_option("--m", config.m, "Scale of the zero-section sphere (radius)")->capture_default_str();
  auto* r_max_opt = app.add_option("--r-max", r_max, "Outer radius (default 20 m)");
  app.add_option("--tol", config.tol, "Integrator tolerance")->capture_default_str();
  app.add_option("--grid", config.grid_points, "Number of grid radii in (0, r_max]")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized checks");
  app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--output", config.output, "Write to PATH instead of stdout");

  app.add_subcommand("solve", "Integrate and tabulate r, a, b, c and derivatives")
      ->fallthrough()
      ->callback([&] { command = Command::solve; });
  app.add_subcommand("verify", "Run every check and print a JSON report")
      ->fallthrough()
      ->callback([&] { command = Command::verify; });
  app.add_subcommand("curvature", "Tabulate curvature components and ASD residuals")
      ->fallthrough()
      ->callback([&] { command = Command::curvature; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ahgeom::exit_code::usage;
  }

  if (*r_max_opt) config.r_max = r_max;
  if (*seed_opt) config.seed = seed;
  config.format = format == "json" ? ahgeom::OutputFormat::json : ahgeom::OutputFormat::csv;

  std::ofstream file;
  if (!config.output.empty()) {
    file.open(config.output);
    if (!file) {
      std::cerr << "error: cannot open " << config.output << " for writing\n";
      return ahgeom::exit_code::usage;
    }
  }
  std::ostream& out = config.output.empty() ? std::cout : file;

  switch (command) {
    case Command::solve:
      return ahgeom::cmd_solve(config, out, std::cerr);
    case Command::verify:
      return ahgeom::cmd_verify(config, out, std::cerr);
    case Command::curvature:
      return ahgeom::cmd_curvature(config, out, std::cerr);
    case Command::none:
      break;
  }
  return ahgeom::exit_code::usage;
}
