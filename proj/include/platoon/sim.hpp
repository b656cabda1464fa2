#pragma once

// Fixed-step closed-loop integration of plant + adaptive estimators, with the
// comparison system co-simulated on the same grid.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/dynamics.hpp"
#include "platoon/stability.hpp"
#include "platoon/topology.hpp"
#include "platoon/types.hpp"

namespace platoon {

struct SimConfig {
  double dt = 1e-3;
  double horizon = 30.0;
  int log_stride = 10;
  std::uint64_t seed = 0;  // reserved for stochastic disturbances

  void validate() const;
  /// Number of dt steps that fit in the horizon.
  long steps() const;
};

/// Any state magnitude beyond this aborts the run with NonFinite.
inline constexpr double kDivergenceLimit = 1e9;

struct Scenario {
  Topology topology;
  VehicleParams vehicle;
  SpacingPolicy spacing;
  LeaderProfile leader;
  double leader_x0 = 0.0;
  PlatoonState initial;
  DisturbanceModel disturbance;
  ControllerConfig controller;
  SimConfig sim;
  double delta_star_prior = 0.0;

  int n() const { return topology.n(); }
  /// Throws ConfigInvalid / Singular / DimensionMismatch on an unrunnable bundle.
  void validate() const;
};

/// Classical RK4 for any vector-space state.
template <class State, class Rhs>
State rk4_step(const State& s, double t, double dt, Rhs&& f) {
  const State k1 = f(t, s);
  const State k2 = f(t + 0.5 * dt, State(s + 0.5 * dt * k1));
  const State k3 = f(t + 0.5 * dt, State(s + 0.5 * dt * k2));
  const State k4 = f(t + dt, State(s + dt * k3));
  return s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Packed integration state [x, v, a, dv_hat, da_hat], each block N long.
struct ClosedLoopState {
  PlatoonState plant;
  AdaptiveState adaptive;

  Vec pack() const;
  static ClosedLoopState unpack(const Vec& packed, int n);
};

/// Everything the controller sees at one instant.
struct ClosedLoopSnapshot {
  LeaderState leader;
  SyncErrors sync;
  BacksteppingErrors errors;
  Vec h_e3;
  Vec u;
  DisturbanceSample disturbance;
  Vec dv_hat;  // estimates as used by the controller (zero under ablation)
  Vec da_hat;
};

ClosedLoopSnapshot evaluate_closed_loop(const Scenario& sc, double t, const ClosedLoopState& s);

/// Time derivative of the packed closed-loop state.
Vec closed_loop_rhs(const Scenario& sc, double t, const Vec& packed);

struct LogRow {
  double t = 0.0;
  Vec x, v, a;
  Vec e_x, e_v, e_a;
  Vec u;
  Vec dv_hat, da_hat;
  LeaderState leader;
  VslfSample vslf;
  double delta_star = 0.0;  // running max at this row
};

struct TrajectoryLog {
  double dt = 0.0;
  int log_stride = 1;
  std::vector<LogRow> rows;

  bool operator==(const TrajectoryLog& other) const;
};

struct Metrics {
  Vec rms_position_error;
  double sup_error = 0.0;  // sup_t |e_x(t)|
  Vec post_transient_amplitude;
  bool certified = false;
  bool comparison_holds = false;
};

struct RunResult {
  TrajectoryLog log;
  Metrics metrics;
  VslfCertificate prior_certificate;  // b with the declared delta_star prior
  VslfCertificate certificate;        // b with the measured delta_star
  ComparisonReport comparison;
  LumpedBounds measured_bounds;  // sampled sups of |D_v|, |D_a| and their rates
  double max_clamp = 0.0;  // largest positive-orthant correction applied to z
};

RunResult run_scenario(const Scenario& scenario);

/// RMS over the grid, sup over the grid, amplitude over the last third.
/// Throws EmptyLog.
Metrics compute_metrics(const TrajectoryLog& log);

struct AblationResult {
  Metrics with_adaptive;
  Metrics without_adaptive;
  Vec amplitude_ratio;  // with / without, 1 where both are below 1e-6
};

AblationResult run_ablation(const Scenario& scenario);

struct SweepRow {
  int n = 0;
  double sup_error = 0.0;
  double normalized_sup_error = 0.0;
  bool certified = false;
};

using ScenarioTemplate = std::function<Scenario(int n)>;

/// One closed-loop run per platoon size; runs execute on up to `threads`
/// workers (0 reads PLATOON_VSS_THREADS, default hardware concurrency).
std::vector<SweepRow> string_stability_sweep(const ScenarioTemplate& make, const std::vector<int>& n_list,
                                             unsigned threads = 0);

unsigned sweep_thread_cap();

struct FdResidual {
  double max_error = 0.0;  // max over rows and vehicles of |D e_x - e_v|
  double time_of_max = 0.0;
  std::size_t rows_checked = 0;
};

/// Differentiates the logged e_x with an (order+1)-point stencil and compares
/// against the logged e_v. Stencils never straddle a time in `kinks` (where
/// the leader acceleration jumps), so the check stays at the stencil's order.
/// Rows with no admissible stencil are skipped.
FdResidual fd_velocity_residual(const TrajectoryLog& log, std::span<const double> kinks,
                                int order = 4);

}  // namespace platoon
