#pragma once

// simulate / verify / sweep / ablate. Each returns the process exit code:
// 0 success, 2 ran to completion but the certificate or check failed,
// 1 operational error (reported on `err`).

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "platoon/scenario.hpp"

namespace platoon {

struct CommandOptions {
  std::optional<std::filesystem::path> scenario;
  std::string preset = "paper-iv";
  std::filesystem::path out = ".";
  std::optional<double> dt;
  std::optional<double> horizon;
  std::vector<int> n_list{4, 8, 16, 32};
};

/// Scenario file (or the preset alone) with --dt / --horizon applied.
ScenarioConfig load_config(const CommandOptions& opts);

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_ablate(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace platoon
