#include "platoon/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <optional>
#include <string>
#include <thread>

#include "platoon/error.hpp"

namespace platoon {

void SimConfig::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw Error(ErrorKind::ConfigInvalid, "dt must be > 0");
  if (!(std::isfinite(horizon) && horizon >= dt)) {
    throw Error(ErrorKind::ConfigInvalid, "horizon must be >= dt");
  }
  if (log_stride < 1) throw Error(ErrorKind::ConfigInvalid, "log_stride must be >= 1");
}

long SimConfig::steps() const {
  return std::max(1L, static_cast<long>(std::floor(horizon / dt + 1e-9)));
}

void Scenario::validate() const {
  const int count = n();
  vehicle.validate();
  controller.validate();
  sim.validate();
  if (controller.n() != count || disturbance.n() != count || initial.x.size() != count ||
      initial.v.size() != count || initial.a.size() != count) {
    throw Error(ErrorKind::DimensionMismatch, "scenario components disagree on N");
  }
  if (!initial.x.allFinite() || !initial.v.allFinite() || !initial.a.allFinite() ||
      !std::isfinite(leader_x0)) {
    throw Error(ErrorKind::ConfigInvalid, "initial state must be finite");
  }
  if (!(std::isfinite(delta_star_prior) && delta_star_prior >= 0.0)) {
    throw Error(ErrorKind::ConfigInvalid, "delta_star_prior must be >= 0");
  }
  if (!topology.leader_spanning_tree()) {
    throw Error(ErrorKind::ConfigInvalid, "topology has no spanning tree rooted at the leader");
  }
  topology.require_h_inverse();
  const double t_last = static_cast<double>(sim.steps()) * sim.dt;
  if (leader.t_begin() > 0.0 || t_last > leader.t_end() + 1e-9) {
    throw Error(ErrorKind::ConfigInvalid, "leader profile does not cover the horizon");
  }
}

Vec ClosedLoopState::pack() const {
  const Eigen::Index n = plant.x.size();
  Vec out(5 * n);
  out << plant.x, plant.v, plant.a, adaptive.dv_hat, adaptive.da_hat;
  return out;
}

ClosedLoopState ClosedLoopState::unpack(const Vec& packed, int n) {
  if (packed.size() != 5 * n) {
    throw Error(ErrorKind::DimensionMismatch, "packed state must have 5N entries");
  }
  return {{packed.segment(0, n), packed.segment(n, n), packed.segment(2 * n, n)},
          {packed.segment(3 * n, n), packed.segment(4 * n, n)}};
}

namespace {

LeaderState leader_at(const Scenario& sc, double t) {
  // RK4 stages of the final step may land an ulp past the last breakpoint.
  return sc.leader.state(std::clamp(t, sc.leader.t_begin(), sc.leader.t_end()), sc.leader_x0);
}

}  // namespace

ClosedLoopSnapshot evaluate_closed_loop(const Scenario& sc, double t, const ClosedLoopState& s) {
  const ControllerConfig& cfg = sc.controller;
  const int n = sc.n();
  ClosedLoopSnapshot snap;
  snap.leader = leader_at(sc, t);
  snap.sync = sync_errors(s.plant, snap.leader, sc.topology, sc.spacing);
  snap.dv_hat = cfg.adaptive_enabled ? s.adaptive.dv_hat : Vec::Zero(n);
  snap.da_hat = cfg.adaptive_enabled ? s.adaptive.da_hat : Vec::Zero(n);
  snap.errors = backstepping_errors(snap.sync, snap.dv_hat, cfg, sc.topology);
  snap.h_e3 = sc.topology.h() * snap.errors.e3;
  // The leader's jerk is zero away from the profile breakpoints.
  snap.u = control_law({snap.errors.e2, snap.errors.e3, snap.dv_hat, snap.da_hat, s.plant.v,
                        s.plant.a, 0.0},
                       cfg, sc.topology, sc.vehicle);
  snap.disturbance = disturbance_at(sc.disturbance, t);
  return snap;
}

Vec closed_loop_rhs(const Scenario& sc, double t, const Vec& packed) {
  const int n = sc.n();
  const ClosedLoopState s = ClosedLoopState::unpack(packed, n);
  const ClosedLoopSnapshot snap = evaluate_closed_loop(sc, t, s);
  const PlatoonState plant_dot = plant_derivatives(s.plant, snap.u, snap.disturbance.d_v,
                                                   snap.disturbance.d_a, sc.vehicle);
  const Vec dv_dot = adaptive_dv_rate(s.adaptive.dv_hat, snap.errors.e2, sc.controller);
  const Vec da_dot = adaptive_da_rate(s.adaptive.da_hat, snap.h_e3, sc.controller, sc.topology);
  Vec out(5 * n);
  out << plant_dot.x, plant_dot.v, plant_dot.a, dv_dot, da_dot;
  return out;
}

bool TrajectoryLog::operator==(const TrajectoryLog& other) const {
  if (dt != other.dt || log_stride != other.log_stride || rows.size() != other.rows.size()) {
    return false;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const LogRow& p = rows[i];
    const LogRow& q = other.rows[i];
    if (p.t != q.t || p.x != q.x || p.v != q.v || p.a != q.a || p.e_x != q.e_x ||
        p.e_v != q.e_v || p.e_a != q.e_a || p.u != q.u || p.dv_hat != q.dv_hat ||
        p.da_hat != q.da_hat || p.leader.x0 != q.leader.x0 || p.leader.v0 != q.leader.v0 ||
        p.leader.a0 != q.leader.a0 || p.vslf.v1 != q.vslf.v1 || p.vslf.v2 != q.vslf.v2 ||
        p.vslf.v3 != q.vslf.v3 || p.vslf.z != q.vslf.z || p.delta_star != q.delta_star) {
      return false;
    }
  }
  return true;
}

namespace {

LogRow make_row(const Scenario& sc, double t, const ClosedLoopState& s,
                const ClosedLoopSnapshot& snap, double delta_star) {
  LogRow row;
  row.t = t;
  row.x = s.plant.x;
  row.v = s.plant.v;
  row.a = s.plant.a;
  row.e_x = snap.sync.e_x;
  row.e_v = snap.sync.e_v;
  row.e_a = snap.sync.e_a;
  row.u = snap.u;
  row.dv_hat = snap.dv_hat;
  row.da_hat = snap.da_hat;
  row.leader = snap.leader;
  row.delta_star = delta_star;
  // Stacked disturbances as they enter the error dynamics: D_v = -H d_v, D_a = -d_a.
  const Vec dv_tilde = -(sc.topology.h() * snap.disturbance.d_v) - snap.dv_hat;
  const Vec da_tilde = -snap.disturbance.d_a - snap.da_hat;
  const VslfValues values = vslf_eval(snap.errors.e1, snap.errors.e2, snap.errors.e3, dv_tilde,
                                      da_tilde, sc.controller, sc.topology);
  row.vslf.t = t;
  row.vslf.v1 = values.v1;
  row.vslf.v2 = values.v2;
  row.vslf.v3 = values.v3;
  return row;
}

void check_divergence(const Vec& packed, double t) {
  if (!packed.allFinite() || packed.cwiseAbs().maxCoeff() > kDivergenceLimit) {
    throw Error(ErrorKind::NonFinite, "closed loop diverged at t = " + std::to_string(t));
  }
}

void update_measured(LumpedBounds& m, const Scenario& sc, double t) {
  const DisturbanceSample d = disturbance_at(sc.disturbance, t);
  const DisturbanceSample r = disturbance_rate_at(sc.disturbance, t);
  const Mat& h = sc.topology.h();
  m.delta_v = std::max(m.delta_v, (h * d.d_v).norm());
  m.delta_v_bar = std::max(m.delta_v_bar, (h * r.d_v).norm());
  m.delta_a = std::max(m.delta_a, d.d_a.norm());
  m.delta_a_bar = std::max(m.delta_a_bar, r.d_a.norm());
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  sc.validate();
  const int n = sc.n();
  const double dt = sc.sim.dt;
  const long steps = sc.sim.steps();
  const Mat& h = sc.topology.h();

  RunResult result;
  result.prior_certificate =
      make_certificate(sc.controller, sc.disturbance.bounds(), sc.delta_star_prior, sc.topology);

  ClosedLoopState state{sc.initial, AdaptiveState::zeros(n)};
  Vec packed = state.pack();
  check_divergence(packed, 0.0);

  const auto rhs = [&sc](double t, const Vec& s) { return closed_loop_rhs(sc, t, s); };

  ClosedLoopSnapshot snap = evaluate_closed_loop(sc, 0.0, state);
  Vec prev_ea_star = snap.errors.ea_star;
  double delta_star = 0.0;
  LumpedBounds measured;
  update_measured(measured, sc, 0.0);

  result.log.dt = dt;
  result.log.log_stride = sc.sim.log_stride;
  std::vector<long> row_steps{0};
  result.log.rows.push_back(make_row(sc, 0.0, state, snap, delta_star));

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double t_next = static_cast<double>(k + 1) * dt;
    packed = rk4_step(packed, t, dt, rhs);
    check_divergence(packed, t_next);
    state = ClosedLoopState::unpack(packed, n);
    snap = evaluate_closed_loop(sc, t_next, state);

    // |H (e_a* - de_a*/dt)| with a backward difference for the derivative.
    const Vec ea_star_rate = (snap.errors.ea_star - prev_ea_star) / dt;
    delta_star = std::max(delta_star, (h * (snap.errors.ea_star - ea_star_rate)).norm());
    prev_ea_star = snap.errors.ea_star;
    update_measured(measured, sc, t_next);

    if ((k + 1) % sc.sim.log_stride == 0 || k + 1 == steps) {
      row_steps.push_back(k + 1);
      result.log.rows.push_back(make_row(sc, t_next, state, snap, delta_star));
    }
  }
  result.measured_bounds = measured;

  // Verified certificate: measured delta_star, and lumped bounds never below
  // what the run actually saw.
  const LumpedBounds& declared = sc.disturbance.bounds();
  LumpedBounds verified{std::max(declared.delta_v, measured.delta_v),
                        std::max(declared.delta_a, measured.delta_a),
                        std::max(declared.delta_v_bar, measured.delta_v_bar),
                        std::max(declared.delta_a_bar, measured.delta_a_bar)};
  result.certificate = make_certificate(sc.controller, verified, delta_star, sc.topology);
  result.certificate.delta_star_estimate = delta_star;
  result.prior_certificate.delta_star_estimate = delta_star;
  if (!sc.disturbance.bounds_declared()) {
    result.certificate.notes.push_back(
        "lumped bounds aggregated as sqrt(N) times the per-vehicle sup");
  }
  if (!(verified == declared)) {
    result.certificate.notes.push_back("sampled disturbance norms exceeded the declared bounds");
  }

  // Comparison system on the same grid, started at z(0) = V(0). It does not
  // feed back into the plant, so it is stepped once the verified b is known.
  const LogRow& first = result.log.rows.front();
  Vec3 z(first.vslf.v1, first.vslf.v2, first.vslf.v3);
  std::size_t next_row = 0;
  for (long k = 0; k <= steps; ++k) {
    if (next_row < row_steps.size() && row_steps[next_row] == k) {
      result.log.rows[next_row].vslf.z = z;
      ++next_row;
    }
    if (k == steps) break;
    const ComparisonStep step =
        step_comparison_detailed(z, result.certificate.gamma, result.certificate.b, dt);
    result.max_clamp = std::max(result.max_clamp, step.clamp);
    z = step.z;
  }

  std::vector<VslfSample> samples;
  samples.reserve(result.log.rows.size());
  for (const LogRow& row : result.log.rows) samples.push_back(row.vslf);
  result.comparison = verify_comparison_principle(samples, kComparisonTolAbs, kComparisonTolRel);

  result.metrics = compute_metrics(result.log);
  result.metrics.certified = result.certificate.certified();
  result.metrics.comparison_holds = result.comparison.holds;
  return result;
}

Metrics compute_metrics(const TrajectoryLog& log) {
  if (log.rows.empty()) throw Error(ErrorKind::EmptyLog, "trajectory log has no rows");
  const Eigen::Index n = log.rows.front().e_x.size();
  const double t_end = log.rows.back().t;
  const double window_start = t_end * 2.0 / 3.0;

  Metrics m;
  m.rms_position_error = Vec::Zero(n);
  m.post_transient_amplitude = Vec::Zero(n);
  for (const LogRow& row : log.rows) {
    m.rms_position_error += row.e_x.cwiseAbs2();
    m.sup_error = std::max(m.sup_error, row.e_x.norm());
    if (row.t >= window_start) {
      m.post_transient_amplitude = m.post_transient_amplitude.cwiseMax(row.e_x.cwiseAbs());
    }
  }
  m.rms_position_error =
      (m.rms_position_error / static_cast<double>(log.rows.size())).cwiseSqrt();
  return m;
}

AblationResult run_ablation(const Scenario& scenario) {
  Scenario with = scenario;
  with.controller.adaptive_enabled = true;
  Scenario without = scenario;
  without.controller.adaptive_enabled = false;

  auto pending = std::async(std::launch::async, [&without] { return run_scenario(without); });
  AblationResult out;
  out.with_adaptive = run_scenario(with).metrics;
  out.without_adaptive = pending.get().metrics;

  const Eigen::Index n = out.with_adaptive.post_transient_amplitude.size();
  out.amplitude_ratio = Vec::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = out.with_adaptive.post_transient_amplitude(i);
    const double b = out.without_adaptive.post_transient_amplitude(i);
    if (a < 1e-6 && b < 1e-6) continue;
    out.amplitude_ratio(i) = a / b;
  }
  return out;
}

unsigned sweep_thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PLATOON_VSS_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && value >= 1) cap = static_cast<unsigned>(value);
  }
  return cap;
}

std::vector<SweepRow> string_stability_sweep(const ScenarioTemplate& make,
                                             const std::vector<int>& n_list, unsigned threads) {
  if (threads == 0) threads = sweep_thread_cap();
  std::vector<SweepRow> rows(n_list.size());
  const auto run_one = [&](std::size_t i) {
    const Scenario sc = make(n_list[i]);
    const RunResult r = run_scenario(sc);
    rows[i] = {n_list[i], r.metrics.sup_error,
               r.metrics.sup_error / std::sqrt(static_cast<double>(n_list[i])),
               r.certificate.certified() && r.comparison.holds};
  };

  // Each worker owns whole runs; results land in their own slot.
  for (std::size_t begin = 0; begin < n_list.size(); begin += threads) {
    const std::size_t end = std::min(n_list.size(), begin + threads);
    std::vector<std::future<void>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, run_one, i));
    }
    for (auto& f : batch) f.get();
  }
  return rows;
}

}  // namespace platoon

namespace platoon {

FdResidual fd_velocity_residual(const TrajectoryLog& log, std::span<const double> kinks,
                                int order) {
  if (order < 1 || order > 8) throw Error(ErrorKind::ConfigInvalid, "stencil order must be 1..8");
  const auto& rows = log.rows;
  const int n_rows = static_cast<int>(rows.size());
  if (n_rows == 0) throw Error(ErrorKind::EmptyLog, "no rows to differentiate");
  const int width = order + 1;

  // Smooth pieces [lo, hi] delimited by the kinks.
  std::vector<double> edges{rows.front().t};
  for (double k : kinks) {
    if (k > rows.front().t && k < rows.back().t) edges.push_back(k);
  }
  edges.push_back(rows.back().t);
  std::sort(edges.begin(), edges.end());
  const double eps = 1e-9 * std::max(1.0, std::abs(rows.back().t));

  FdResidual out;
  for (int k = 0; k < n_rows; ++k) {
    const double tk = rows[static_cast<std::size_t>(k)].t;
    std::optional<int> first;
    for (std::size_t p = 0; p + 1 < edges.size() && !first; ++p) {
      const double lo = edges[p] - eps;
      const double hi = edges[p + 1] + eps;
      if (tk < lo || tk > hi) continue;
      // Most central admissible window first.
      for (int shift = 0; shift <= order && !first; ++shift) {
        for (int sign : {-1, 1}) {
          const int start = k - order / 2 + sign * shift;
          if (start < 0 || start + width > n_rows) continue;
          if (rows[static_cast<std::size_t>(start)].t < lo ||
              rows[static_cast<std::size_t>(start + width - 1)].t > hi) {
            continue;
          }
          first = start;
          break;
        }
      }
    }
    if (!first) continue;

    // Taylor-matching weights for the first derivative at tk.
    const double h = rows[static_cast<std::size_t>(*first + 1)].t - rows[static_cast<std::size_t>(*first)].t;
    Mat vander(width, width);
    for (int j = 0; j < width; ++j) {
      const double off = (rows[static_cast<std::size_t>(*first + j)].t - tk) / h;
      double power = 1.0;
      for (int p = 0; p < width; ++p) {
        vander(p, j) = power;
        power *= off;
      }
    }
    Vec rhs = Vec::Zero(width);
    rhs(1) = 1.0;
    const Vec w = vander.colPivHouseholderQr().solve(rhs) / h;

    const LogRow& row = rows[static_cast<std::size_t>(k)];
    Vec deriv = Vec::Zero(row.e_x.size());
    for (int j = 0; j < width; ++j) deriv += w(j) * rows[static_cast<std::size_t>(*first + j)].e_x;
    const double err = (deriv - row.e_v).cwiseAbs().maxCoeff();
    if (err > out.max_error) {
      out.max_error = err;
      out.time_of_max = tk;
    }
    ++out.rows_checked;
  }
  return out;
}

}  // namespace platoon
