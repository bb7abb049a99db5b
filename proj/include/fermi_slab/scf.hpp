#pragma once

#include <optional>
#include <vector>

#include "fermi_slab/errors.hpp"
#include "fermi_slab/fermi.hpp"
#include "fermi_slab/grid.hpp"

namespace fslab {

struct ScfConfig {
  int max_iter = 200;
  double tol = 1e-8;  // on ||scf_map(V) - V||_inf
  double mixing_alpha = 0.3;
  int anderson_depth = 5;
  /// Starting potential; the unperturbed Fermi sea (V = 0) when empty.
  std::optional<PotentialProfile> initial_potential;

  void validate() const;
};

struct EnergyBreakdown {
  double t_ren = 0.0;
  double interaction = 0.0;  // 1/2 D_m(rho_Q - nu, rho_Q - nu)
  double total = 0.0;
};

struct ScfResult {
  bool converged;
  int iterations;
  std::vector<double> residual_history;
  PotentialProfile V_final;
  DensityProfile rho_Q;
  DensityProfile nu;
  EnergyBreakdown energy;
  double total_defect_charge;  // \int (rho_Q - nu)
  double epsilon_F;
  double m;
};

/// Thrown by scf_solve when max_iter is exhausted; holds the last iterate.
class ScfNonConvergence : public NonConvergence {
public:
  ScfNonConvergence(const std::string& what, ScfResult partial)
      : NonConvergence(what, partial.residual_history), partial_(std::move(partial)) {}
  const ScfResult& partial() const noexcept { return partial_; }

private:
  ScfResult partial_;
};

/// One application of V -> (e^{-m|.|}/m) * (rho_Q[V] - nu).
PotentialProfile scf_map(const PotentialProfile& V_in, const DensityProfile& nu, const PhysicalParams& params);
PotentialProfile scf_map(const PotentialProfile& V_in, const DensityProfile& nu, const PhysicalParams& params,
                         const FreeReference& free);

/// Damped (optionally Anderson-accelerated) fixed-point iteration of scf_map.
ScfResult scf_solve(const DensityProfile& nu, const PhysicalParams& params, const ScfConfig& cfg = {});

}  // namespace fslab
