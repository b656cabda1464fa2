#include "platoon/stability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "platoon/error.hpp"

namespace platoon {

Mat3 assemble_gamma(const ControllerConfig& cfg) {
  // Gains are diagonal, so lambda_min / lambda_max are entry-wise min / max.
  const double k1_min = cfg.k1.minCoeff();
  const double k1_sq_max = cfg.k1.cwiseAbs2().maxCoeff();
  const double k21_min = (cfg.k2 - cfg.k1).minCoeff();
  const double k2_max = cfg.k2.maxCoeff();
  const double k3_min = cfg.k3.minCoeff();
  Mat3 g;
  g << -k1_min, 1.0, 0.0,
       k1_sq_max, -k21_min, 1.0,
       0.0, k2_max, -k3_min;
  return g;
}

Vec3 assemble_b(const std::optional<LumpedBounds>& bounds, const ControllerConfig& cfg,
                double delta_star) {
  if (!bounds) throw Error(ErrorKind::MissingBounds, "lumped disturbance bounds not declared");
  const LumpedBounds& lb = *bounds;
  for (double x : {lb.delta_v, lb.delta_a, lb.delta_v_bar, lb.delta_a_bar}) {
    if (!(std::isfinite(x) && x >= 0.0)) {
      throw Error(ErrorKind::MissingBounds, "lumped disturbance bound is negative or not finite");
    }
  }
  if (!(std::isfinite(delta_star) && delta_star >= 0.0)) {
    throw Error(ErrorKind::MissingBounds, "delta_star must be finite and non-negative");
  }
  Vec3 b;
  b(0) = 0.0;
  b(1) = 0.5 * cfg.kappa1 * lb.delta_v * lb.delta_v + lb.delta_v_bar * lb.delta_v_bar / (2.0 * cfg.eps1);
  b(2) = 0.5 * cfg.kappa2 * lb.delta_a * lb.delta_a + lb.delta_a_bar * lb.delta_a_bar / (2.0 * cfg.eps2) +
         delta_star;
  return b;
}

bool is_metzler(const Mat& gamma) {
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
    for (Eigen::Index j = 0; j < gamma.cols(); ++j) {
      if (i != j && !(gamma(i, j) >= 0.0)) return false;
    }
  }
  return true;
}

double spectral_abscissa(const Mat& m) {
  Eigen::EigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
  return solver.eigenvalues().real().maxCoeff();
}

bool hurwitz_by_eigenvalues(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  return spectral_abscissa(m) < 0.0;
}

Vec3 characteristic_coefficients(const Mat3& m) {
  const double trace = m.trace();
  const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) +
                        m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  return {-trace, minors, -m.determinant()};
}

bool hurwitz_by_routh(const Mat3& m) {
  const Vec3 c = characteristic_coefficients(m);
  return c(0) > 0.0 && c(2) > 0.0 && c(0) * c(1) > c(2);
}

bool is_hurwitz(const Mat& gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() == 0 || gamma.rows() > 8) return false;
  const bool eig = hurwitz_by_eigenvalues(gamma);
  if (gamma.rows() == 3) return eig && hurwitz_by_routh(Mat3(gamma));
  return eig;
}

SmallGainVerdict small_gain_verdict(const Mat& gamma) {
  if (!is_metzler(gamma)) return {Verdict::Failed, "not_metzler"};
  if (!is_hurwitz(gamma)) return {Verdict::Failed, "not_hurwitz"};
  return {Verdict::Certified, ""};
}

VslfCertificate make_certificate(const ControllerConfig& cfg, const LumpedBounds& bounds,
                                 double delta_star, const Topology& topo) {
  VslfCertificate cert;
  cert.gamma = assemble_gamma(cfg);
  cert.bounds = bounds;
  cert.delta_star = delta_star;
  cert.b = assemble_b(bounds, cfg, delta_star);
  cert.metzler = is_metzler(cert.gamma);
  cert.hurwitz = is_hurwitz(cert.gamma);
  cert.gain_conditions = check_gain_conditions(cfg);

  if (!cert.gain_conditions.cond_a) {
    cert.reason = "gain_condition_a";
  } else if (!cert.gain_conditions.cond_b) {
    cert.reason = "gain_condition_b";
  } else {
    cert.reason = small_gain_verdict(cert.gamma).reason;
  }
  cert.verdict = cert.reason.empty() ? Verdict::Certified : Verdict::Failed;

  if (!topo.symmetric()) {
    cert.notes.push_back("asymmetric adjacency: bounds derived for the general topology class");
  }
  if (!topo.h_inverse()) {
    cert.notes.push_back("H is singular: the controller cannot be evaluated");
    if (cert.reason.empty()) {
      cert.reason = "singular_h";
      cert.verdict = Verdict::Failed;
    }
  }
  if (cert.gain_conditions.margin_a == 0.0 || cert.gain_conditions.margin_b == 0.0) {
    cert.notes.push_back("a gain condition holds with equality (margin 0)");
  }
  return cert;
}

VslfValues vslf_eval(const Vec& e1, const Vec& e2, const Vec& e3, const Vec& dv_tilde,
                     const Vec& da_tilde, const ControllerConfig& cfg, const Topology& topo) {
  const int n = topo.n();
  for (const Vec* v : {&e1, &e2, &e3, &dv_tilde, &da_tilde}) {
    if (v->size() != n) throw Error(ErrorKind::DimensionMismatch, "VSLF argument length");
  }
  return {e1.norm(), e2.norm() + dv_tilde.squaredNorm() / (2.0 * cfg.eps1),
          (topo.h() * e3).norm() + da_tilde.squaredNorm() / (2.0 * cfg.eps2)};
}

ComparisonStep step_comparison_detailed(const Vec3& z, const Mat3& gamma, const Vec3& b,
                                        double dt) {
  const auto f = [&](const Vec3& s) -> Vec3 { return gamma * s + b; };
  const Vec3 k1 = f(z);
  const Vec3 k2 = f(z + 0.5 * dt * k1);
  const Vec3 k3 = f(z + 0.5 * dt * k2);
  const Vec3 k4 = f(z + dt * k3);
  ComparisonStep out{z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0};
  for (int i = 0; i < 3; ++i) {
    if (out.z(i) < 0.0) {
      out.clamp = std::max(out.clamp, -out.z(i));
      out.z(i) = 0.0;
    }
  }
  return out;
}

Vec3 step_comparison(const Vec3& z, const Mat3& gamma, const Vec3& b, double dt) {
  return step_comparison_detailed(z, gamma, b, dt).z;
}

ComparisonReport verify_comparison_principle(std::span<const VslfSample> samples, double tol_abs,
                                             double tol_rel) {
  ComparisonReport r;
  double worst = 0.0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const VslfSample& sample = samples[s];
    if (s > 0 && !(sample.t > samples[s - 1].t)) {
      throw Error(ErrorKind::GridMismatch, "sample times must strictly increase");
    }
    const double v[3] = {sample.v1, sample.v2, sample.v3};
    bool violated = false;
    for (int k = 0; k < 3; ++k) {
      const double excess = v[k] - sample.z(k);
      if (excess > worst) {
        worst = excess;
        r.time_of_worst = sample.t;
        r.component_of_worst = k;
      }
      if (v[k] > sample.z(k) + tol_abs + tol_rel * sample.z(k)) violated = true;
    }
    if (violated) {
      r.holds = false;
      ++r.violations;
    }
  }
  r.worst_violation = worst;
  return r;
}

}  // namespace platoon
