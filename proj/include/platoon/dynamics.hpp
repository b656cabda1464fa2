#pragma once

// Follower longitudinal dynamics with mismatched disturbances, the leader
// reference, disturbance generators and synchronization errors.

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "platoon/topology.hpp"
#include "platoon/types.hpp"

namespace platoon {

struct VehicleParams {
  double m = 1500.0;    // kg
  double tau = 0.2;     // s, engine time constant
  double a_f = 2.2;     // m^2, effective frontal area
  double rho = 0.78;    // kg/m^3
  double c_d = 0.35;    // aerodynamic drag coefficient
  double c_r = 0.067;   // rolling resistance coefficient

  /// Throws ConfigInvalid unless every field is strictly positive and finite.
  void validate() const;

  bool operator==(const VehicleParams&) const = default;
};

/// f(v, a): open-loop jerk of one follower [m/s^3].
double drift_f(double v, double a, const VehicleParams& params);

/// g = 1/(m tau), the input gain.
double gain_g(const VehicleParams& params);

struct LeaderState {
  double x0 = 0.0;
  double v0 = 0.0;
  double a0 = 0.0;
};

/// Piecewise-linear leader velocity through (t, v) breakpoints. The
/// acceleration is the slope of the segment containing t (right-continuous,
/// with the last segment closed at the final breakpoint).
class LeaderProfile {
 public:
  explicit LeaderProfile(std::vector<std::pair<double, double>> breakpoints);

  /// 15 m/s, ramp to 25, hold, ramp down to 20, hold, over [0, 30] s.
  static LeaderProfile reference_preset();
  static LeaderProfile constant(double v, double horizon);

  double t_begin() const { return points_.front().first; }
  double t_end() const { return points_.back().first; }
  const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

  /// (v0, a0) at t; OutOfHorizon outside [t_begin, t_end].
  std::pair<double, double> at(double t) const;

  /// Exact integral of the velocity from t_begin, added to x_init.
  LeaderState state(double t, double x_init) const;

 private:
  std::size_t segment(double t) const;

  std::vector<std::pair<double, double>> points_;
};

std::pair<double, double> leader_profile(double t);

struct PlatoonState {
  Vec x;
  Vec v;
  Vec a;

  int n() const { return static_cast<int>(x.size()); }
};

enum class SignalKind { Zero, Constant, Sinusoid };

std::optional<SignalKind> parse_signal_kind(std::string_view name);
std::string_view to_string(SignalKind kind);

/// One disturbance channel, identical in shape for every vehicle; vehicle i
/// (0-based) is shifted by i * phase_step.
struct SignalChannel {
  SignalKind kind = SignalKind::Zero;
  double amplitude = 0.0;
  double omega = 0.0;  // rad/s
  double phase = 0.0;  // rad
  double phase_step = 0.0;

  double value(double t, int vehicle) const;
  double rate(double t, int vehicle) const;
  double sup() const;       // analytic sup |value|
  double rate_sup() const;  // analytic sup |rate|

  bool operator==(const SignalChannel&) const = default;
};

/// Bounds on the stacked disturbances: |D_v| <= delta_v, |dD_v/dt| <= delta_v_bar,
/// likewise for the input channel.
struct LumpedBounds {
  double delta_v = 0.0;
  double delta_a = 0.0;
  double delta_v_bar = 0.0;
  double delta_a_bar = 0.0;

  bool operator==(const LumpedBounds&) const = default;
};

/// Per-vehicle sups lumped as sqrt(N) * sup (Euclidean stacking).
LumpedBounds aggregate_bounds(const SignalChannel& v, const SignalChannel& a, int n);

class DisturbanceModel {
 public:
  /// Without declared bounds the aggregated ones are used. Declared bounds
  /// below the aggregated analytic sup throw ConfigInvalid.
  DisturbanceModel(int n, SignalChannel velocity, SignalChannel accel,
                   std::optional<LumpedBounds> declared = std::nullopt);

  /// 20 sin t on the velocity channel, 5 sin t on the input channel.
  static DisturbanceModel reference_preset(int n);
  static DisturbanceModel zero(int n);

  int n() const { return n_; }
  const SignalChannel& velocity() const { return velocity_; }
  const SignalChannel& accel() const { return accel_; }
  const LumpedBounds& bounds() const { return bounds_; }
  bool bounds_declared() const { return declared_; }

 private:
  int n_;
  SignalChannel velocity_;
  SignalChannel accel_;
  LumpedBounds bounds_;
  bool declared_;
};

struct DisturbanceSample {
  Vec d_v;  // m/s^2, enters the velocity equation
  Vec d_a;  // m/s^3, enters the acceleration equation
};

DisturbanceSample disturbance_at(const DisturbanceModel& model, double t);
DisturbanceSample disturbance_rate_at(const DisturbanceModel& model, double t);

/// Cumulative offsets d_i = sum_{k<=i} (delta_d + L) for a homogeneous string.
class SpacingPolicy {
 public:
  SpacingPolicy(double delta_d, double vehicle_length);

  double delta_d() const { return delta_d_; }
  double vehicle_length() const { return vehicle_length_; }
  Vec offsets(int n) const;

 private:
  double delta_d_;
  double vehicle_length_;
};

struct SyncErrors {
  Vec e_x;
  Vec e_v;
  Vec e_a;  // a0 * 1 - a
};

SyncErrors sync_errors(const PlatoonState& platoon, const LeaderState& leader,
                       const Topology& topo, const SpacingPolicy& spacing);

/// (x', v', a') for x' = v, v' = a + d_v, a' = f(v, a) + g u + d_a.
/// `params` holds either one entry (homogeneous) or one per vehicle.
PlatoonState plant_derivatives(const PlatoonState& platoon, const Vec& u, const Vec& d_v,
                               const Vec& d_a, std::span<const VehicleParams> params);
PlatoonState plant_derivatives(const PlatoonState& platoon, const Vec& u, const Vec& d_v,
                               const Vec& d_a, const VehicleParams& params);

}  // namespace platoon
