#include "platoon/report.hpp"

#include "platoon/scenario.hpp"

namespace platoon {

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    out << cells[i];
  }
  out << '\n';
}

std::string num(double x) { return format_double(x); }

std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::vector<std::string> trajectory_columns(int n) {
  std::vector<std::string> cols{"t"};
  for (int i = 1; i <= n; ++i) {
    const std::string s = std::to_string(i);
    for (const char* name : {"x_", "v_", "a_", "ex_", "ev_", "u_", "dvhat_", "dahat_"}) {
      cols.push_back(name + s);
    }
  }
  for (const char* name : {"x0", "v0", "a0", "V1", "V2", "V3", "z1", "z2", "z3"}) {
    cols.emplace_back(name);
  }
  return cols;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  const int n = log.rows.empty() ? 0 : static_cast<int>(log.rows.front().x.size());
  write_row(out, trajectory_columns(n));
  std::vector<std::string> cells;
  for (const LogRow& r : log.rows) {
    cells.clear();
    cells.push_back(num(r.t));
    for (int i = 0; i < n; ++i) {
      for (const Vec* v : {&r.x, &r.v, &r.a, &r.e_x, &r.e_v, &r.u, &r.dv_hat, &r.da_hat}) {
        cells.push_back(num((*v)(i)));
      }
    }
    for (double x : {r.leader.x0, r.leader.v0, r.leader.a0, r.vslf.v1, r.vslf.v2, r.vslf.v3,
                     r.vslf.z(0), r.vslf.z(1), r.vslf.z(2)}) {
      cells.push_back(num(x));
    }
    write_row(out, cells);
  }
}

void write_metrics_csv(std::ostream& out, const Metrics& m, const VslfCertificate* cert,
                       const ComparisonReport* comparison) {
  out << "metric,vehicle,value\n";
  for (Eigen::Index i = 0; i < m.rms_position_error.size(); ++i) {
    out << "rms_position_error," << i + 1 << ',' << num(m.rms_position_error(i)) << '\n';
  }
  for (Eigen::Index i = 0; i < m.post_transient_amplitude.size(); ++i) {
    out << "post_transient_amplitude," << i + 1 << ',' << num(m.post_transient_amplitude(i)) << '\n';
  }
  out << "sup_error,all," << num(m.sup_error) << '\n';
  out << "certified,all," << (m.certified ? 1 : 0) << '\n';
  out << "comparison_holds,all," << (m.comparison_holds ? 1 : 0) << '\n';
  if (cert) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        out << "gamma_" << r + 1 << c + 1 << ",all," << num(cert->gamma(r, c)) << '\n';
      }
    }
    for (int k = 0; k < 3; ++k) out << "b_" << k + 1 << ",all," << num(cert->b(k)) << '\n';
    out << "metzler,all," << (cert->metzler ? 1 : 0) << '\n';
    out << "hurwitz,all," << (cert->hurwitz ? 1 : 0) << '\n';
    out << "gain_margin_a,all," << num(cert->gain_conditions.margin_a) << '\n';
    out << "gain_margin_b,all," << num(cert->gain_conditions.margin_b) << '\n';
    out << "delta_star,all," << num(cert->delta_star) << '\n';
  }
  if (comparison) {
    out << "comparison_worst_violation,all," << num(comparison->worst_violation) << '\n';
    out << "comparison_violations,all," << comparison->violations << '\n';
  }
}

void write_certificate(std::ostream& out, const VslfCertificate& cert,
                       const ComparisonReport* comparison) {
  out << "verdict: " << (cert.certified() ? "certified" : "failed") << '\n';
  out << "reason: " << (cert.reason.empty() ? "none" : cert.reason) << '\n';
  for (int r = 0; r < 3; ++r) {
    out << "gamma_row" << r + 1 << ": " << num(cert.gamma(r, 0)) << ' ' << num(cert.gamma(r, 1))
        << ' ' << num(cert.gamma(r, 2)) << '\n';
  }
  out << "b: " << num(cert.b(0)) << ' ' << num(cert.b(1)) << ' ' << num(cert.b(2)) << '\n';
  out << "metzler: " << flag(cert.metzler) << '\n';
  out << "hurwitz: " << flag(cert.hurwitz) << '\n';
  out << "spectral_abscissa: " << num(spectral_abscissa(cert.gamma)) << '\n';
  out << "gain_condition_a: " << flag(cert.gain_conditions.cond_a) << '\n';
  out << "gain_margin_a: " << num(cert.gain_conditions.margin_a) << '\n';
  out << "gain_condition_b: " << flag(cert.gain_conditions.cond_b) << '\n';
  out << "gain_margin_b: " << num(cert.gain_conditions.margin_b) << '\n';
  out << "delta_v: " << num(cert.bounds.delta_v) << '\n';
  out << "delta_a: " << num(cert.bounds.delta_a) << '\n';
  out << "delta_v_bar: " << num(cert.bounds.delta_v_bar) << '\n';
  out << "delta_a_bar: " << num(cert.bounds.delta_a_bar) << '\n';
  out << "delta_star: " << num(cert.delta_star) << '\n';
  out << "delta_star_estimate: " << num(cert.delta_star_estimate) << '\n';
  out << "bound_aggregation: euclidean stacking, sqrt(N) times the per-vehicle sup\n";
  if (comparison) {
    out << "comparison_holds: " << flag(comparison->holds) << '\n';
    out << "comparison_worst_violation: " << num(comparison->worst_violation) << '\n';
    out << "comparison_time_of_worst: " << num(comparison->time_of_worst) << '\n';
    out << "comparison_component_of_worst: " << comparison->component_of_worst + 1 << '\n';
    out << "comparison_violations: " << comparison->violations << '\n';
  }
  for (const std::string& note : cert.notes) out << "note: " << note << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  write_row(out, kSweepColumns);
  for (const SweepRow& r : rows) {
    out << r.n << ',' << num(r.sup_error) << ',' << num(r.normalized_sup_error) << ','
        << (r.certified ? 1 : 0) << '\n';
  }
}

void write_ablation_metrics_csv(std::ostream& out, const AblationResult& res) {
  const Metrics& w = res.with_adaptive;
  const Metrics& wo = res.without_adaptive;
  out << "metric,vehicle,with_adaptive,without_adaptive\n";
  for (Eigen::Index i = 0; i < w.rms_position_error.size(); ++i) {
    out << "rms_position_error," << i + 1 << ',' << num(w.rms_position_error(i)) << ','
        << num(wo.rms_position_error(i)) << '\n';
  }
  for (Eigen::Index i = 0; i < w.post_transient_amplitude.size(); ++i) {
    out << "post_transient_amplitude," << i + 1 << ',' << num(w.post_transient_amplitude(i))
        << ',' << num(wo.post_transient_amplitude(i)) << '\n';
  }
  out << "sup_error,all," << num(w.sup_error) << ',' << num(wo.sup_error) << '\n';
}

void write_amplitude_ratio_csv(std::ostream& out, const AblationResult& res) {
  out << "vehicle,amplitude_with,amplitude_without,ratio\n";
  for (Eigen::Index i = 0; i < res.amplitude_ratio.size(); ++i) {
    out << i + 1 << ',' << num(res.with_adaptive.post_transient_amplitude(i)) << ','
        << num(res.without_adaptive.post_transient_amplitude(i)) << ','
        << num(res.amplitude_ratio(i)) << '\n';
  }
}

}  // namespace platoon
