#pragma once

#include <string>
#include <vector>

namespace fslab {

struct ValidationCheck {
  std::string name;
  bool passed;
  double value;
  double tolerance;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
};

/// Oracle-equivalence and manufactured-solution checks on small grids
/// (a few seconds in total).
ValidationReport run_validation_suite();

}  // namespace fslab
