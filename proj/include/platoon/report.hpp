#pragma once

// CSV and text emitters. Column names and order are part of the public
// interface; every number is written as shortest round-trip decimal text.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "platoon/sim.hpp"
#include "platoon/stability.hpp"

namespace platoon {

std::vector<std::string> trajectory_columns(int n);
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);

/// Long format: metric,vehicle,value. Vehicle is 1-based, "all" for scalars.
void write_metrics_csv(std::ostream& out, const Metrics& metrics, const VslfCertificate* cert,
                       const ComparisonReport* comparison);

/// key: value lines.
void write_certificate(std::ostream& out, const VslfCertificate& cert,
                       const ComparisonReport* comparison = nullptr);

inline const std::vector<std::string> kSweepColumns = {"N", "sup_error", "normalized_sup_error",
                                                       "certified"};
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// metric,vehicle,with_adaptive,without_adaptive
void write_ablation_metrics_csv(std::ostream& out, const AblationResult& result);
/// vehicle,amplitude_with,amplitude_without,ratio
void write_amplitude_ratio_csv(std::ostream& out, const AblationResult& result);

}  // namespace platoon
