#include "platoon/commands.hpp"

#include <fstream>

#include "platoon/error.hpp"
#include "platoon/report.hpp"

namespace platoon {

namespace {

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  std::ofstream f(dir / name);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + (dir / name).string());
  return f;
}

void write_echo(const CommandOptions& opts, const ScenarioConfig& config) {
  open_output(opts.out, "scenario.ini") << emit_scenario(config);
}

// Shared error-to-exit-code mapping.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

ScenarioConfig load_config(const CommandOptions& opts) {
  if (opts.preset != "paper-iv") {
    throw Error(ErrorKind::ValidationError, "preset: unknown preset '" + opts.preset + "'");
  }
  ScenarioConfig config = opts.scenario ? parse_scenario(*opts.scenario) : ScenarioConfig::paper_iv();
  if (opts.dt) config.sim.dt = *opts.dt;
  if (opts.horizon) config.sim.horizon = *opts.horizon;
  build_scenario(config);
  return config;
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig config = load_config(opts);
    const RunResult res = run_scenario(build_scenario(config));
    write_echo(opts, config);
    {
      auto f = open_output(opts.out, "trajectory.csv");
      write_trajectory_csv(f, res.log);
    }
    {
      auto f = open_output(opts.out, "metrics.csv");
      write_metrics_csv(f, res.metrics, &res.certificate, &res.comparison);
    }
    {
      auto f = open_output(opts.out, "certificate.txt");
      write_certificate(f, res.certificate, &res.comparison);
    }
    out << "sup_error: " << format_double(res.metrics.sup_error) << '\n'
        << "certified: " << (res.certificate.certified() ? "true" : "false") << '\n'
        << "comparison_holds: " << (res.comparison.holds ? "true" : "false") << '\n';
    return res.certificate.certified() && res.comparison.holds ? 0 : 2;
  });
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = build_scenario(load_config(opts));
    const VslfCertificate cert = make_certificate(sc.controller, sc.disturbance.bounds(),
                                                  sc.delta_star_prior, sc.topology);
    write_certificate(out, cert);
    return cert.certified() ? 0 : 2;
  });
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.n_list.empty()) throw Error(ErrorKind::ConfigInvalid, "--n-list is empty");
    const ScenarioConfig config = load_config(opts);
    const auto rows = string_stability_sweep(sweep_template(config), opts.n_list);
    write_echo(opts, config);
    {
      auto f = open_output(opts.out, "sweep.csv");
      write_sweep_csv(f, rows);
    }
    write_sweep_csv(out, rows);
    bool all = true;
    for (const SweepRow& r : rows) all = all && r.certified;
    return all ? 0 : 2;
  });
}

int cmd_ablate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig config = load_config(opts);
    const AblationResult res = run_ablation(build_scenario(config));
    write_echo(opts, config);
    {
      auto f = open_output(opts.out, "ablation_metrics.csv");
      write_ablation_metrics_csv(f, res);
    }
    {
      auto f = open_output(opts.out, "amplitude_ratio.csv");
      write_amplitude_ratio_csv(f, res);
    }
    write_amplitude_ratio_csv(out, res);
    // The adaptive laws should shrink every vehicle's residual oscillation.
    bool smaller = true;
    for (Eigen::Index i = 0; i < res.amplitude_ratio.size(); ++i) {
      smaller = smaller && res.with_adaptive.post_transient_amplitude(i) <
                               res.without_adaptive.post_transient_amplitude(i);
    }
    return smaller ? 0 : 2;
  });
}

}  // namespace platoon
