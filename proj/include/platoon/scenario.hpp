#pragma once

// Scenario files: an INI-style document with [topology], [vehicle], [spacing],
// [leader], [disturbance], [controller] and [sim] sections. Every key is
// optional; missing keys take the reference (paper-iv) values.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "platoon/dynamics.hpp"
#include "platoon/sim.hpp"

namespace platoon {

struct TopologySpec {
  std::string preset = "bidirectional-leader";
  int n = 4;
  std::vector<std::vector<double>> adjacency;  // explicit form when non-empty
  std::vector<double> pinning;

  bool operator==(const TopologySpec&) const = default;
};

struct InitialSpec {
  std::vector<double> x_init{15.0, 10.0, 5.0, 0.0};  // empty: formation + position_offset
  std::vector<double> position_offset{0.0};
  std::vector<double> v_init{0.0};  // one entry broadcasts to every vehicle
  std::vector<double> a_init{0.0};

  bool operator==(const InitialSpec&) const = default;
};

struct LeaderSpec {
  std::string profile = "paper-iv";  // or "breakpoints"
  std::vector<std::pair<double, double>> breakpoints;
  double x0 = 20.0;

  bool operator==(const LeaderSpec&) const = default;
};

struct DisturbanceSpec {
  SignalChannel velocity{SignalKind::Sinusoid, 20.0, 1.0, 0.0, 0.0};
  SignalChannel accel{SignalKind::Sinusoid, 5.0, 1.0, 0.0, 0.0};
  std::optional<LumpedBounds> declared;

  bool operator==(const DisturbanceSpec&) const = default;
};

struct ControllerSpec {
  std::vector<double> k1{7.0};
  std::vector<double> k2{21.0};
  std::vector<double> k3{24.0};
  double eps1 = 100.0;
  double eps2 = 50.0;
  double kappa1 = 0.5;
  double kappa2 = 0.5;
  double sgn_deadzone = 1e-9;
  bool adaptive_enabled = true;
  double delta_star_prior = 0.0;

  bool operator==(const ControllerSpec&) const = default;
};

struct SimSpec {
  double dt = 1e-3;
  double horizon = 30.0;
  int log_stride = 10;
  std::uint64_t seed = 0;

  bool operator==(const SimSpec&) const = default;
};

/// Declarative scenario description; defaults reproduce the reference case.
struct ScenarioConfig {
  std::string preset = "paper-iv";
  TopologySpec topology;
  VehicleParams vehicle;
  InitialSpec initial;
  double delta_d = 3.0;
  double vehicle_length = 2.5;
  LeaderSpec leader;
  DisturbanceSpec disturbance;
  ControllerSpec controller;
  SimSpec sim;

  static ScenarioConfig paper_iv() { return {}; }

  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ParseError (with the line number) or ValidationError (naming the key).
ScenarioConfig parse_scenario_text(std::string_view text);
ScenarioConfig parse_scenario(const std::filesystem::path& path);

/// Full-precision text that parse_scenario_text maps back to an equal config.
std::string emit_scenario(const ScenarioConfig& config);

/// Runtime bundle; throws ValidationError when the pieces are inconsistent.
Scenario build_scenario(const ScenarioConfig& config);

/// Re-sizes the config to N followers: the topology preset takes parameter N
/// and per-vehicle initial errors and gains are tiled cyclically, so every
/// vehicle keeps a fixed initial error and disturbance amplitude.
ScenarioConfig resize_scenario(const ScenarioConfig& config, int n);
ScenarioTemplate sweep_template(const ScenarioConfig& config);

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double x);

}  // namespace platoon
