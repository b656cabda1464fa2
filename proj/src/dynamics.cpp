#include "platoon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "platoon/error.hpp"

namespace platoon {

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void require_size(const Vec& v, int n, const char* what) {
  if (v.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " has length " +
                                                  std::to_string(v.size()) + ", expected " +
                                                  std::to_string(n));
  }
}

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
  }
}

}  // namespace

void VehicleParams::validate() const {
  if (!(positive(m) && positive(tau) && positive(a_f) && positive(rho) && positive(c_d) &&
        positive(c_r))) {
    throw Error(ErrorKind::ConfigInvalid, "vehicle parameters must be strictly positive");
  }
}

double drift_f(double v, double a, const VehicleParams& p) {
  const double drag = p.a_f * p.rho * p.c_d;
  return -(a + drag * v * v / (2.0 * p.m) + p.c_r) / p.tau - drag * v * a / p.m;
}

double gain_g(const VehicleParams& p) { return 1.0 / (p.m * p.tau); }

// ---------------------------------------------------------------------------

LeaderProfile::LeaderProfile(std::vector<std::pair<double, double>> breakpoints)
    : points_(std::move(breakpoints)) {
  if (points_.size() < 2) {
    throw Error(ErrorKind::ConfigInvalid, "leader profile needs at least two breakpoints");
  }
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (!std::isfinite(points_[k].first) || !std::isfinite(points_[k].second)) {
      throw Error(ErrorKind::ConfigInvalid, "leader breakpoint is not finite");
    }
    if (k > 0 && !(points_[k].first > points_[k - 1].first)) {
      throw Error(ErrorKind::ConfigInvalid, "leader breakpoint times must increase strictly");
    }
  }
}

LeaderProfile LeaderProfile::reference_preset() {
  return LeaderProfile({{0.0, 15.0}, {5.0, 15.0}, {10.0, 25.0}, {15.0, 25.0},
                        {20.0, 20.0}, {30.0, 20.0}});
}

LeaderProfile LeaderProfile::constant(double v, double horizon) {
  return LeaderProfile({{0.0, v}, {horizon, v}});
}

std::size_t LeaderProfile::segment(double t) const {
  if (!(t >= t_begin() && t <= t_end())) {
    throw Error(ErrorKind::OutOfHorizon, "t = " + std::to_string(t) +
                                             " outside the leader profile [" +
                                             std::to_string(t_begin()) + ", " +
                                             std::to_string(t_end()) + "]");
  }
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double value, const auto& p) { return value < p.first; });
  auto k = static_cast<std::size_t>(it - points_.begin());
  return std::min(k, points_.size() - 1) - 1;
}

std::pair<double, double> LeaderProfile::at(double t) const {
  const std::size_t k = segment(t);
  const auto& [t0, v0] = points_[k];
  const auto& [t1, v1] = points_[k + 1];
  const double slope = (v1 - v0) / (t1 - t0);
  return {v0 + slope * (t - t0), slope};
}

LeaderState LeaderProfile::state(double t, double x_init) const {
  const std::size_t seg = segment(t);
  double x = x_init;
  for (std::size_t k = 0; k < seg; ++k) {
    x += 0.5 * (points_[k].second + points_[k + 1].second) *
         (points_[k + 1].first - points_[k].first);
  }
  const auto [v, a] = at(t);
  x += 0.5 * (points_[seg].second + v) * (t - points_[seg].first);
  return {x, v, a};
}

std::pair<double, double> leader_profile(double t) {
  static const LeaderProfile profile = LeaderProfile::reference_preset();
  return profile.at(t);
}

// ---------------------------------------------------------------------------

std::optional<SignalKind> parse_signal_kind(std::string_view name) {
  if (name == "zero") return SignalKind::Zero;
  if (name == "constant") return SignalKind::Constant;
  if (name == "sinusoid") return SignalKind::Sinusoid;
  return std::nullopt;
}

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::Zero: return "zero";
    case SignalKind::Constant: return "constant";
    case SignalKind::Sinusoid: return "sinusoid";
  }
  return "unknown";
}

double SignalChannel::value(double t, int vehicle) const {
  switch (kind) {
    case SignalKind::Zero: return 0.0;
    case SignalKind::Constant: return amplitude;
    case SignalKind::Sinusoid:
      return amplitude * std::sin(omega * t + phase + vehicle * phase_step);
  }
  return 0.0;
}

double SignalChannel::rate(double t, int vehicle) const {
  if (kind != SignalKind::Sinusoid) return 0.0;
  return amplitude * omega * std::cos(omega * t + phase + vehicle * phase_step);
}

double SignalChannel::sup() const {
  return kind == SignalKind::Zero ? 0.0 : std::abs(amplitude);
}

double SignalChannel::rate_sup() const {
  return kind == SignalKind::Sinusoid ? std::abs(amplitude * omega) : 0.0;
}

LumpedBounds aggregate_bounds(const SignalChannel& v, const SignalChannel& a, int n) {
  const double root_n = std::sqrt(static_cast<double>(n));
  return {root_n * v.sup(), root_n * a.sup(), root_n * v.rate_sup(), root_n * a.rate_sup()};
}

DisturbanceModel::DisturbanceModel(int n, SignalChannel velocity, SignalChannel accel,
                                   std::optional<LumpedBounds> declared)
    : n_(n), velocity_(velocity), accel_(accel), declared_(declared.has_value()) {
  if (n < 1) throw Error(ErrorKind::ConfigInvalid, "disturbance model needs n >= 1");
  for (const SignalChannel* c : {&velocity_, &accel_}) {
    if (!std::isfinite(c->amplitude) || !std::isfinite(c->omega) || !std::isfinite(c->phase) ||
        !std::isfinite(c->phase_step) || c->omega < 0.0) {
      throw Error(ErrorKind::ConfigInvalid, "disturbance channel has invalid parameters");
    }
  }
  const LumpedBounds analytic = aggregate_bounds(velocity_, accel_, n);
  if (!declared) {
    bounds_ = analytic;
    return;
  }
  bounds_ = *declared;
  const auto check = [](double declared_value, double sup, const char* name) {
    // 1e-12 relative slack so sqrt(N)*A round-trips through text.
    if (!(declared_value >= sup * (1.0 - 1e-12))) {
      throw Error(ErrorKind::ConfigInvalid, std::string("declared bound ") + name + " = " +
                                                std::to_string(declared_value) +
                                                " is below the signal sup " +
                                                std::to_string(sup));
    }
  };
  check(bounds_.delta_v, analytic.delta_v, "delta_v");
  check(bounds_.delta_a, analytic.delta_a, "delta_a");
  check(bounds_.delta_v_bar, analytic.delta_v_bar, "delta_v_bar");
  check(bounds_.delta_a_bar, analytic.delta_a_bar, "delta_a_bar");
}

DisturbanceModel DisturbanceModel::reference_preset(int n) {
  return DisturbanceModel(n, {SignalKind::Sinusoid, 20.0, 1.0, 0.0, 0.0},
                          {SignalKind::Sinusoid, 5.0, 1.0, 0.0, 0.0});
}

DisturbanceModel DisturbanceModel::zero(int n) { return DisturbanceModel(n, {}, {}); }

DisturbanceSample disturbance_at(const DisturbanceModel& model, double t) {
  DisturbanceSample s{Vec(model.n()), Vec(model.n())};
  for (int i = 0; i < model.n(); ++i) {
    s.d_v(i) = model.velocity().value(t, i);
    s.d_a(i) = model.accel().value(t, i);
  }
  return s;
}

DisturbanceSample disturbance_rate_at(const DisturbanceModel& model, double t) {
  DisturbanceSample s{Vec(model.n()), Vec(model.n())};
  for (int i = 0; i < model.n(); ++i) {
    s.d_v(i) = model.velocity().rate(t, i);
    s.d_a(i) = model.accel().rate(t, i);
  }
  return s;
}

// ---------------------------------------------------------------------------

SpacingPolicy::SpacingPolicy(double delta_d, double vehicle_length)
    : delta_d_(delta_d), vehicle_length_(vehicle_length) {
  if (!(positive(delta_d) && positive(vehicle_length))) {
    throw Error(ErrorKind::ConfigInvalid, "delta_d and vehicle_length must be positive");
  }
}

Vec SpacingPolicy::offsets(int n) const {
  Vec d(n);
  for (int i = 0; i < n; ++i) d(i) = (i + 1) * (delta_d_ + vehicle_length_);
  return d;
}

SyncErrors sync_errors(const PlatoonState& platoon, const LeaderState& leader,
                       const Topology& topo, const SpacingPolicy& spacing) {
  const int n = topo.n();
  require_size(platoon.x, n, "x");
  require_size(platoon.v, n, "v");
  require_size(platoon.a, n, "a");
  // With y = x + d, e_x = H (x0 1 - y); the neighbour terms are -L y and
  // L 1 = 0 lets the leader term be written through H as well.
  const Vec y = platoon.x + spacing.offsets(n);
  SyncErrors e;
  e.e_x = topo.h() * (Vec::Constant(n, leader.x0) - y);
  e.e_v = topo.h() * (Vec::Constant(n, leader.v0) - platoon.v);
  e.e_a = Vec::Constant(n, leader.a0) - platoon.a;
  return e;
}

PlatoonState plant_derivatives(const PlatoonState& platoon, const Vec& u, const Vec& d_v,
                               const Vec& d_a, std::span<const VehicleParams> params) {
  const int n = platoon.n();
  require_size(platoon.v, n, "v");
  require_size(platoon.a, n, "a");
  require_size(u, n, "u");
  require_size(d_v, n, "d_v");
  require_size(d_a, n, "d_a");
  if (params.size() != 1 && params.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::DimensionMismatch, "vehicle params must be 1 or N entries");
  }
  require_finite(platoon.x, "x");
  require_finite(platoon.v, "v");
  require_finite(platoon.a, "a");
  require_finite(u, "u");
  require_finite(d_v, "d_v");
  require_finite(d_a, "d_a");

  PlatoonState dot{platoon.v, platoon.a + d_v, Vec(n)};
  for (int i = 0; i < n; ++i) {
    const VehicleParams& p = params.size() == 1 ? params[0] : params[static_cast<std::size_t>(i)];
    dot.a(i) = drift_f(platoon.v(i), platoon.a(i), p) + gain_g(p) * u(i) + d_a(i);
  }
  return dot;
}

PlatoonState plant_derivatives(const PlatoonState& platoon, const Vec& u, const Vec& d_v,
                               const Vec& d_a, const VehicleParams& params) {
  return plant_derivatives(platoon, u, d_v, d_a, std::span<const VehicleParams>(&params, 1));
}

}  // namespace platoon
