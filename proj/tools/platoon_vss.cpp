#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "platoon/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Distributed adaptive backstepping platoon simulator and VSLF certifier"};
  app.require_subcommand(1);

  platoon::CommandOptions opts;
  std::string scenario;

  const auto common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--scenario", scenario, "Scenario file (INI)")->check(CLI::ExistingFile);
    sub->add_option("--preset", opts.preset, "Reference preset")->check(CLI::IsMember({"paper-iv"}));
    sub->add_option("--dt", opts.dt, "Integration step [s], overrides the file");
    sub->add_option("--horizon", opts.horizon, "Simulated horizon [s], overrides the file");
    if (with_out) sub->add_option("--out", opts.out, "Output directory");
  };

  auto* simulate = app.add_subcommand("simulate", "Closed-loop run with trajectory, metrics and certificate");
  common(simulate, true);
  auto* verify = app.add_subcommand("verify", "Print the certificate without simulating");
  common(verify, false);
  auto* sweep = app.add_subcommand("sweep", "String-stability sweep over platoon sizes");
  common(sweep, true);
  sweep->add_option("--n-list", opts.n_list, "Platoon sizes")->delimiter(',')->check(CLI::PositiveNumber);
  auto* ablate = app.add_subcommand("ablate", "Adaptive laws on versus off");
  common(ablate, true);

  CLI11_PARSE(app, argc, argv);
  if (!scenario.empty()) opts.scenario = scenario;

  if (simulate->parsed()) return platoon::cmd_simulate(opts, std::cout, std::cerr);
  if (verify->parsed()) return platoon::cmd_verify(opts, std::cout, std::cerr);
  if (sweep->parsed()) return platoon::cmd_sweep(opts, std::cout, std::cerr);
  return platoon::cmd_ablate(opts, std::cout, std::cerr);
}
