#include "fermi_slab/scf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fermi_slab/interaction.hpp"
#include "fermi_slab/log.hpp"
#include "fermi_slab/mixing.hpp"
#include "fermi_slab/spectral.hpp"

namespace fslab {
namespace {

void require_yukawa(const PhysicalParams& params) {
  if (!(params.m() > 0.0)) {
    throw InvalidArgument("the self-consistent iteration needs a Yukawa interaction (m > 0); got m = " +
                          std::to_string(params.m()));
  }
}

// Support margin: distance from the outermost non-negligible sample of nu to the wall.
double support_margin(const DensityProfile& nu) {
  double peak = 0.0;
  for (double v : nu.values()) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return nu.grid().half_length();
  double extent = 0.0;
  for (int i = 0; i < nu.size(); ++i) {
    if (std::abs(nu[i]) > 1e-14 * peak) extent = std::max(extent, std::abs(nu.grid().node(i)));
  }
  return nu.grid().half_length() - extent;
}

struct IterateState {
  DensityProfile rho_Q;
  PotentialProfile mapped;
  SpectralDecomposition spectrum;
};

IterateState evaluate(const PotentialProfile& V, const DensityProfile& nu, const PhysicalParams& params,
                      const FreeReference& free) {
  auto spectrum = eigendecompose(build_hamiltonian(V.grid(), V), params.epsilon_F());
  auto rho_Q = assemble_density(spectrum, params.epsilon_F()) - free.density;
  auto mapped = detail::yukawa_solve_unchecked(rho_Q - nu, params.m());
  return {std::move(rho_Q), std::move(mapped), std::move(spectrum)};
}

ScfResult finish(bool converged, int iterations, std::vector<double> history, const PotentialProfile& V,
                 IterateState state, const DensityProfile& nu, const PhysicalParams& params,
                 const FreeReference& free) {
  EnergyBreakdown energy;
  energy.t_ren = kinetic_free_energy(state.spectrum, V, free.eigenvalues, params.epsilon_F());
  const DensityProfile charge = state.rho_Q - nu;
  energy.interaction = 0.5 * dm_inner(charge, charge, InteractionKind::yukawa(params.m()));
  energy.total = energy.t_ren + energy.interaction;
  const double total_charge = integrate(charge);
  return ScfResult{converged,
                   iterations,
                   std::move(history),
                   V,
                   std::move(state.rho_Q),
                   nu,
                   energy,
                   total_charge,
                   params.epsilon_F(),
                   params.m()};
}

}  // namespace

void ScfConfig::validate() const {
  if (max_iter < 1) throw InvalidArgument("scf.max_iter must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("scf.tol must be > 0");
  if (!(mixing_alpha > 0.0 && mixing_alpha <= 1.0)) throw InvalidArgument("scf.mixing_alpha must lie in (0, 1]");
  if (anderson_depth < 0) throw InvalidArgument("scf.anderson_depth must be >= 0");
}

PotentialProfile scf_map(const PotentialProfile& V_in, const DensityProfile& nu, const PhysicalParams& params) {
  require_yukawa(params);
  return scf_map(V_in, nu, params, make_free_reference(V_in.grid(), params.epsilon_F()));
}

PotentialProfile scf_map(const PotentialProfile& V_in, const DensityProfile& nu, const PhysicalParams& params,
                         const FreeReference& free) {
  require_yukawa(params);
  require_same_grid(V_in.grid(), nu.grid(), "scf_map");
  const DensityProfile rho_Q = renormalized_density(V_in, params.epsilon_F(), free);
  return yukawa_solve(rho_Q - nu, params.m());
}

ScfResult scf_solve(const DensityProfile& nu, const PhysicalParams& params, const ScfConfig& cfg) {
  require_yukawa(params);
  cfg.validate();
  const GridSpec& grid = nu.grid();
  const double margin = support_margin(nu);
  if (margin < 10.0 / params.m()) {
    std::ostringstream msg;
    msg << "defect support reaches within " << margin << " of the box wall; need a margin >= 10/m = "
        << 10.0 / params.m();
    throw InvalidArgument(msg.str());
  }
  if (params.m() * grid.half_length() < 30.0) {
    std::ostringstream msg;
    msg << "m*L = " << params.m() * grid.half_length() << " < 30; the Yukawa potential is truncated at the walls";
    log::warn(msg.str());
  }

  const FreeReference free = make_free_reference(grid, params.epsilon_F());
  PotentialProfile V = PotentialProfile::zeros(grid);
  if (cfg.initial_potential) {
    require_same_grid(cfg.initial_potential->grid(), grid, "scf initial potential");
    V = *cfg.initial_potential;
  }

  AndersonMixer mixer(cfg.mixing_alpha, cfg.anderson_depth);
  std::vector<double> history;
  std::vector<double> residual(static_cast<std::size_t>(grid.size()));
  for (int iteration = 1;; ++iteration) {
    IterateState state = evaluate(V, nu, params, free);
    double res = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
      residual[static_cast<std::size_t>(i)] = state.mapped[i] - V[i];
      res = std::max(res, std::abs(residual[static_cast<std::size_t>(i)]));
    }
    history.push_back(res);
    if (res <= cfg.tol) {
      return finish(true, iteration, std::move(history), V, std::move(state), nu, params, free);
    }
    if (iteration >= cfg.max_iter) {
      std::ostringstream msg;
      msg << "SCF did not converge in " << cfg.max_iter << " iterations (last residual " << res << ", tol "
          << cfg.tol << ")";
      throw ScfNonConvergence(msg.str(),
                              finish(false, iteration, std::move(history), V, std::move(state), nu, params, free));
    }
    V = PotentialProfile(grid, mixer.next(V.values(), residual));
  }
}

}  // namespace fslab
