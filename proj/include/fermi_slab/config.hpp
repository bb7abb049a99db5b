#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fermi_slab/analysis.hpp"
#include "fermi_slab/grid.hpp"
#include "fermi_slab/scf.hpp"

namespace fslab {

enum class DefectType { Trench, File };

struct RunConfig {
  struct Physics {
    double epsilon_F = 2.0;
    double m = 4.0;
  } physics;
  struct Defect {
    DefectType type = DefectType::Trench;
    double w = 4.0;
    double depth_scale = 1.0;
    double mollify_s = 0.0;
    std::filesystem::path file;  // resolved against the config file's directory
  } defect;
  struct Grid {
    double L = 60.0;
    int n = 2001;
  } grid;
  struct Scf {
    int max_iter = 200;
    double tol = 1e-8;
    double mixing_alpha = 0.3;
    int anderson_depth = 5;
  } scf;
  struct Analysis {
    bool window_set = false;  // false: [w + 4, L - 10]
    double window_lo = 0.0;
    double window_hi = 0.0;
    bool free_exponent = true;
    std::vector<double> m_sweep{4.0, 2.0, 1.0, 0.5};
  } analysis;
  struct Output {
    std::filesystem::path directory = "out";
    bool csv = true;
    bool json = true;
  } output;

  GridSpec grid_spec() const { return GridSpec(grid.L, grid.n); }
  PhysicalParams physical_params() const { return PhysicalParams(physics.epsilon_F, physics.m); }
  ScfConfig scf_config() const;
  FriedelWindow friedel_window() const;
};

/// Parses sectioned `key = value` text ([section] headers, `#`/`;` comments).
/// `origin` names the source in error locations. Overrides are `section.key=value`
/// strings applied after the text. Throws ConfigError.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                       const std::vector<std::string>& overrides = {},
                       const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Sorted `section.key = value` lines of every setting except output.directory.
std::string canonical_config(const RunConfig& cfg);

/// FNV-1a 64 of canonical_config, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// All recognised dotted keys.
const std::vector<std::string>& known_config_keys();

}  // namespace fslab
