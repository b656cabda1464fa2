#pragma once

// Vector string Lyapunov function (VSLF) certificate: the linear comparison
// system z' = Gamma z + b, its Metzler / Hurwitz small-gain checks, and the
// runtime comparison principle V(t) <= z(t).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/dynamics.hpp"
#include "platoon/topology.hpp"
#include "platoon/types.hpp"

namespace platoon {

/// [[-min K1, 1, 0], [max K1^2, -min(K2-K1), 1], [0, max K2, -min K3]].
Mat3 assemble_gamma(const ControllerConfig& cfg);

/// [0, kappa1 dv^2/2 + dv_bar^2/(2 eps1), kappa2 da^2/2 + da_bar^2/(2 eps2) + delta_star].
/// Throws MissingBounds when `bounds` is empty or contains a negative/NaN entry.
Vec3 assemble_b(const std::optional<LumpedBounds>& bounds, const ControllerConfig& cfg,
                double delta_star);

bool is_metzler(const Mat& gamma);

/// Max real part over the eigenvalues.
double spectral_abscissa(const Mat& m);

/// All eigenvalues strictly in the open left half-plane (eigen-solver path).
bool hurwitz_by_eigenvalues(const Mat& m);

/// Routh-Hurwitz on lambda^3 + a2 lambda^2 + a1 lambda + a0.
bool hurwitz_by_routh(const Mat3& m);

/// Characteristic polynomial coefficients (a2, a1, a0) of a 3x3 matrix.
Vec3 characteristic_coefficients(const Mat3& m);

/// Eigenvalue test, additionally cross-checked by Routh-Hurwitz for 3x3.
/// The two paths must agree for a positive answer.
bool is_hurwitz(const Mat& gamma);

enum class Verdict { Certified, Failed };

struct SmallGainVerdict {
  Verdict verdict = Verdict::Failed;
  std::string reason;  // empty when certified
};

/// Linear small-gain condition: Gamma Metzler and Hurwitz.
SmallGainVerdict small_gain_verdict(const Mat& gamma);

struct VslfCertificate {
  Mat3 gamma = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  bool metzler = false;
  bool hurwitz = false;
  GainReport gain_conditions;
  LumpedBounds bounds;
  double delta_star = 0.0;           // value entered into b
  double delta_star_estimate = 0.0;  // running max measured online (0 before a run)
  Verdict verdict = Verdict::Failed;
  std::string reason;
  std::vector<std::string> notes;

  bool certified() const { return verdict == Verdict::Certified; }
};

/// Assembles Gamma and b and runs every check. The verdict fails on the
/// first of: gain condition a, gain condition b, not Metzler, not Hurwitz.
VslfCertificate make_certificate(const ControllerConfig& cfg, const LumpedBounds& bounds,
                                 double delta_star, const Topology& topo);

struct VslfValues {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
};

/// V1 = |e1|, V2 = |e2| + |Dv~|^2/(2 eps1), V3 = |H e3| + |Da~|^2/(2 eps2).
VslfValues vslf_eval(const Vec& e1, const Vec& e2, const Vec& e3, const Vec& dv_tilde,
                     const Vec& da_tilde, const ControllerConfig& cfg, const Topology& topo);

struct VslfSample {
  double t = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  Vec3 z = Vec3::Zero();
};

struct ComparisonStep {
  Vec3 z;
  double clamp = 0.0;  // largest amount any entry was lifted back to zero
};

/// One RK4 step of z' = Gamma z + b followed by an entrywise clamp at zero.
ComparisonStep step_comparison_detailed(const Vec3& z, const Mat3& gamma, const Vec3& b,
                                        double dt);
Vec3 step_comparison(const Vec3& z, const Mat3& gamma, const Vec3& b, double dt);

struct ComparisonReport {
  bool holds = true;
  double worst_violation = 0.0;  // max(0, max_k V_k - z_k)
  double time_of_worst = 0.0;
  int component_of_worst = -1;   // 0-based, -1 when V <= z everywhere
  std::size_t violations = 0;    // samples outside the tolerance band
};

/// Holds iff V_k <= z_k + tol_abs + tol_rel z_k for every sample and k.
/// Throws GridMismatch unless sample times strictly increase.
ComparisonReport verify_comparison_principle(std::span<const VslfSample> samples, double tol_abs,
                                             double tol_rel);

inline constexpr double kComparisonTolAbs = 1e-3;
inline constexpr double kComparisonTolRel = 1e-2;

}  // namespace platoon
