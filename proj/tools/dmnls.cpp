#include <iostream>

#include <CLI11.hpp>

#include "dmnls/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Averaged dispersion-managed cubic NLS: simulation and verification"};
  app.set_version_flag("--version", DMNLS_VERSION);
  app.require_subcommand(1);

  std::string config, scheme = "rk4", level = "fast", sign = "standard", run_dir;
  bool quiet = false;
  dmnls::ScatterOptions scatter;
  dmnls::SweepOptions sweep;

  auto* run = app.add_subcommand("run", "integrate a configuration into a new run directory");
  run->add_option("config", config, "config file")->required();
  run->add_option("--scheme", scheme, "rk4 (interaction-picture RK4) or strang (constant dispersion only)")
      ->check(CLI::IsMember({"rk4", "rk4-interaction", "strang"}));
  run->add_flag("-q,--quiet", quiet, "print only the run directory");

  auto* verify = app.add_subcommand("verify", "run the identity and convergence checks");
  verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--kernel-sign", sign, "transform kernel of the grid-level checks")
      ->check(CLI::IsMember({"standard", "flipped"}));

  auto* scat = app.add_subcommand("scatter", "extract scattering profiles and fit rates from a run directory");
  scat->add_option("run_dir", run_dir, "run directory")->required();
  scat->add_option("--t-min", scatter.analysis.t_min, "start of the fit window")->capture_default_str();
  scat->add_option("--g-t-min", scatter.analysis.g_t_min, "start of the dyadic-difference window")->capture_default_str();
  scat->add_flag("--allow-short", scatter.analysis.allow_short, "accept runs shorter than t = 50");

  auto* sw = app.add_subcommand("sweep", "run and analyze the Cartesian product of list-valued keys");
  sw->add_option("config", config, "config file with comma-separated lists")->required();
  sw->add_option("--jobs", sweep.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sw->add_option("--t-min", sweep.analysis.t_min, "start of the fit window")->capture_default_str();
  sw->add_flag("--allow-short", sweep.analysis.allow_short, "accept runs shorter than t = 50");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*run) return dmnls::cmd_run(config, dmnls::parse_scheme(scheme), std::cout, std::cerr, quiet);
  if (*verify) {
    dmnls::VerifyOptions opt;
    opt.level = dmnls::parse_verify_level(level);
    opt.sign = sign == "flipped" ? dmnls::KernelSign::flipped : dmnls::KernelSign::standard;
    return dmnls::cmd_verify(opt, std::cout);
  }
  if (*scat) return dmnls::cmd_scatter(run_dir, scatter, std::cout, std::cerr);
  if (*sw) return dmnls::cmd_sweep(config, sweep, std::cout, std::cerr);
  return 2;
}
