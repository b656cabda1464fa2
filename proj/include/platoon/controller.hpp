#pragma once

// Three-step distributed adaptive backstepping controller.
//
//   e1 = e_x,           e_v* = -K1 e1,                 e2 = e_v - e_v*
//   e_a* = H^-1 (-K2 e2 - Dv_hat),                     e3 = e_a - e_a*
//   u = G^-1 (-F + a0_dot 1 + H^-1 K3 H e3 + H^-1 Dv_hat + Da_hat)
//
// with estimator dynamics
//   Dv_hat' = -eps1 kappa1 Dv_hat + eps1 sgn(e2)
//   Da_hat' = -eps2 kappa2 Da_hat + eps2 H^T sgn(H e3).

#include <span>

#include "platoon/dynamics.hpp"
#include "platoon/topology.hpp"
#include "platoon/types.hpp"

namespace platoon {

struct ControllerConfig {
  Vec k1;
  Vec k2;
  Vec k3;
  double eps1 = 100.0;
  double eps2 = 50.0;
  double kappa1 = 0.5;
  double kappa2 = 0.5;
  double sgn_deadzone = 1e-9;
  bool adaptive_enabled = true;

  /// K1 = 7I, K2 = 21I, K3 = 24I with the estimator rates above.
  static ControllerConfig reference_preset(int n);
  static ControllerConfig scalar_gains(int n, double k1, double k2, double k3);

  int n() const { return static_cast<int>(k1.size()); }

  /// Throws ConfigInvalid on non-positive gains, mismatched lengths or
  /// k2[i] <= k1[i].
  void validate() const;
};

struct AdaptiveState {
  Vec dv_hat;
  Vec da_hat;

  static AdaptiveState zeros(int n) { return {Vec::Zero(n), Vec::Zero(n)}; }
};

/// w / |w| outside the deadzone, zero inside (Euclidean norm).
Vec signed_direction(const Vec& w, double deadzone);

Vec virtual_ev_star(const Vec& e1, const ControllerConfig& cfg);

/// H^-1 (-K2 e2 - Dv_hat). Throws Singular when H has no inverse.
Vec virtual_ea_star(const Vec& e2, const Vec& dv_hat, const ControllerConfig& cfg,
                    const Topology& topo);

/// Zero when the adaptive laws are disabled.
Vec adaptive_dv_rate(const Vec& dv_hat, const Vec& e2, const ControllerConfig& cfg);
Vec adaptive_da_rate(const Vec& da_hat, const Vec& h_e3, const ControllerConfig& cfg,
                     const Topology& topo);

struct ControlInputs {
  const Vec& e2;
  const Vec& e3;
  const Vec& dv_hat;
  const Vec& da_hat;
  const Vec& v;
  const Vec& a;
  double a0_dot = 0.0;
};

Vec control_law(const ControlInputs& in, const ControllerConfig& cfg, const Topology& topo,
                std::span<const VehicleParams> params);
Vec control_law(const ControlInputs& in, const ControllerConfig& cfg, const Topology& topo,
                const VehicleParams& params);

/// Backstepping error coordinates evaluated from synchronization errors.
struct BacksteppingErrors {
  Vec e1;
  Vec e2;
  Vec ea_star;
  Vec e3;
};

BacksteppingErrors backstepping_errors(const SyncErrors& sync, const Vec& dv_hat,
                                       const ControllerConfig& cfg, const Topology& topo);

struct GainReport {
  bool cond_a = false;  // lambda_min(K2 - K1) <= eps1 kappa1 - 1
  bool cond_b = false;  // lambda_min(K3) <= eps2 kappa2 - 1
  double margin_a = 0.0;
  double margin_b = 0.0;
};

GainReport check_gain_conditions(const ControllerConfig& cfg);

}  // namespace platoon
