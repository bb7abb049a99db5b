#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fermi_slab/grid.hpp"

namespace fslab {

inline constexpr const char* kToolName = "fermi_slab";
inline constexpr const char* kToolVersion = "1.0.0";

/// Shortest decimal form that reads back to the same double, locale independent.
std::string format_double(double x);

/// Strict decimal parse of the whole token; throws InvalidArgument.
double parse_double(const std::string& token);

struct DensityColumns {
  std::vector<double> z, nu, rho_Q, rho_total, V;
};

/// `# key = value` header lines preceding the CSV table.
using CsvMetadata = std::map<std::string, std::string>;

void write_density_csv(const std::filesystem::path& path, const CsvMetadata& meta, const DensityColumns& cols);

struct DensityTable {
  CsvMetadata meta;
  DensityColumns cols;
};

DensityTable read_density_csv(const std::filesystem::path& path);

/// Reads a two-column `z,nu` table (comments with `#`) and checks that its
/// nodes coincide with the grid.
DensityProfile read_defect_csv(const std::filesystem::path& path, const GridSpec& grid);

struct MSweepRow {
  double m, I, charge;
  int iterations;
};

void write_msweep_csv(const std::filesystem::path& path, const CsvMetadata& meta, const std::vector<MSweepRow>& rows);

/// Writes text with a trailing newline, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fslab
