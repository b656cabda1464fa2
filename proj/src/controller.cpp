#include "platoon/controller.hpp"

#include <cmath>
#include <string>

#include "platoon/error.hpp"

namespace platoon {

ControllerConfig ControllerConfig::scalar_gains(int n, double k1, double k2, double k3) {
  ControllerConfig cfg;
  cfg.k1 = Vec::Constant(n, k1);
  cfg.k2 = Vec::Constant(n, k2);
  cfg.k3 = Vec::Constant(n, k3);
  return cfg;
}

ControllerConfig ControllerConfig::reference_preset(int n) { return scalar_gains(n, 7.0, 21.0, 24.0); }

void ControllerConfig::validate() const {
  const Eigen::Index n = k1.size();
  if (n < 1 || k2.size() != n || k3.size() != n) {
    throw Error(ErrorKind::ConfigInvalid, "k1, k2, k3 must be non-empty and equally long");
  }
  const auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!positive(k1(i)) || !positive(k2(i)) || !positive(k3(i))) {
      throw Error(ErrorKind::ConfigInvalid, "gains must be positive (vehicle " +
                                                std::to_string(i) + ")");
    }
    if (!(k2(i) > k1(i))) {
      throw Error(ErrorKind::ConfigInvalid, "k2 must exceed k1 (vehicle " + std::to_string(i) +
                                                ")");
    }
  }
  if (!positive(eps1) || !positive(eps2) || !positive(kappa1) || !positive(kappa2)) {
    throw Error(ErrorKind::ConfigInvalid, "eps1, eps2, kappa1, kappa2 must be positive");
  }
  if (!(std::isfinite(sgn_deadzone) && sgn_deadzone >= 0.0)) {
    throw Error(ErrorKind::ConfigInvalid, "sgn_deadzone must be >= 0");
  }
}

Vec signed_direction(const Vec& w, double deadzone) {
  const double norm = w.norm();
  if (norm > deadzone && norm > 0.0) return w / norm;
  return Vec::Zero(w.size());
}

Vec virtual_ev_star(const Vec& e1, const ControllerConfig& cfg) {
  return -cfg.k1.cwiseProduct(e1);
}

Vec virtual_ea_star(const Vec& e2, const Vec& dv_hat, const ControllerConfig& cfg,
                    const Topology& topo) {
  return topo.require_h_inverse() * (-cfg.k2.cwiseProduct(e2) - dv_hat);
}

Vec adaptive_dv_rate(const Vec& dv_hat, const Vec& e2, const ControllerConfig& cfg) {
  if (!cfg.adaptive_enabled) return Vec::Zero(dv_hat.size());
  return -cfg.eps1 * cfg.kappa1 * dv_hat + cfg.eps1 * signed_direction(e2, cfg.sgn_deadzone);
}

Vec adaptive_da_rate(const Vec& da_hat, const Vec& h_e3, const ControllerConfig& cfg,
                     const Topology& topo) {
  if (!cfg.adaptive_enabled) return Vec::Zero(da_hat.size());
  return -cfg.eps2 * cfg.kappa2 * da_hat +
         cfg.eps2 * (topo.h().transpose() * signed_direction(h_e3, cfg.sgn_deadzone));
}

Vec control_law(const ControlInputs& in, const ControllerConfig& cfg, const Topology& topo,
                std::span<const VehicleParams> params) {
  const Mat& h_inv = topo.require_h_inverse();
  const int n = topo.n();
  if (params.size() != 1 && params.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::DimensionMismatch, "vehicle params must be 1 or N entries");
  }
  const Vec dv_hat = cfg.adaptive_enabled ? in.dv_hat : Vec::Zero(n);
  const Vec da_hat = cfg.adaptive_enabled ? in.da_hat : Vec::Zero(n);
  const Vec coupled = h_inv * (cfg.k3.cwiseProduct(topo.h() * in.e3) + dv_hat);
  Vec u(n);
  for (int i = 0; i < n; ++i) {
    const VehicleParams& p = params.size() == 1 ? params[0] : params[static_cast<std::size_t>(i)];
    const double rhs = -drift_f(in.v(i), in.a(i), p) + in.a0_dot + coupled(i) + da_hat(i);
    u(i) = rhs / gain_g(p);
  }
  return u;
}

Vec control_law(const ControlInputs& in, const ControllerConfig& cfg, const Topology& topo,
                const VehicleParams& params) {
  return control_law(in, cfg, topo, std::span<const VehicleParams>(&params, 1));
}

BacksteppingErrors backstepping_errors(const SyncErrors& sync, const Vec& dv_hat,
                                       const ControllerConfig& cfg, const Topology& topo) {
  BacksteppingErrors b;
  b.e1 = sync.e_x;
  b.e2 = sync.e_v - virtual_ev_star(b.e1, cfg);
  const Vec used_dv = cfg.adaptive_enabled ? dv_hat : Vec::Zero(dv_hat.size());
  b.ea_star = virtual_ea_star(b.e2, used_dv, cfg, topo);
  b.e3 = sync.e_a - b.ea_star;
  return b;
}

GainReport check_gain_conditions(const ControllerConfig& cfg) {
  GainReport r;
  const double lhs_a = (cfg.k2 - cfg.k1).minCoeff();
  const double lhs_b = cfg.k3.minCoeff();
  r.margin_a = (cfg.eps1 * cfg.kappa1 - 1.0) - lhs_a;
  r.margin_b = (cfg.eps2 * cfg.kappa2 - 1.0) - lhs_b;
  // Equality is accepted; the reference gains sit exactly on the boundary of cond_b.
  r.cond_a = r.margin_a >= 0.0;
  r.cond_b = r.margin_b >= 0.0;
  return r;
}

}  // namespace platoon
