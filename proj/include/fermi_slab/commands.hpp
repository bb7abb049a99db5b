#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fermi_slab/config.hpp"

namespace fslab {

enum ExitCode : int { kExitOk = 0, kExitOther = 1, kExitConfig = 2, kExitNonConvergence = 3, kExitValidation = 4 };

struct CommandOptions {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> out_dir;
  std::vector<std::string> overrides;
  bool quiet = false;
  std::optional<std::filesystem::path> input;  // fit-friedel: density.csv to read
};

/// Each command validates its configuration, writes its files and returns an
/// exit code. Errors surface as exceptions; run_command maps them.
int cmd_solve(const CommandOptions& opts);
int cmd_sweep_m(const CommandOptions& opts);
int cmd_fit_friedel(const CommandOptions& opts);
int cmd_free_gas(const CommandOptions& opts);
int cmd_validate(const CommandOptions& opts);

/// Runs one of the commands above, printing machine-readable error JSON to
/// stderr (and error.json in --out when given) on failure.
int run_command(const std::string& name, const CommandOptions& opts);

/// Configuration from --config (or defaults) with overrides applied.
RunConfig resolve_config(const CommandOptions& opts);

DensityProfile build_defect(const RunConfig& cfg, const GridSpec& grid);

}  // namespace fslab
