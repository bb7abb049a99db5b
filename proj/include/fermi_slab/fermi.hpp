#pragma once

#include <span>
#include <vector>

#include "fermi_slab/grid.hpp"
#include "fermi_slab/spectral.hpp"

namespace fslab {

/// One in-plane fiber: |q| and the effective Fermi level eF - |q|^2/2 of the
/// 1D problem it reduces to.
struct QFiberSample {
  double q_norm;
  double effective_fermi;

  static QFiberSample at(double q_norm, double epsilon_F) {
    return {q_norm, epsilon_F - 0.5 * q_norm * q_norm};
  }
  /// Membership in the open ball {|q|^2/2 < R}.
  bool in_ball(double R) const noexcept { return 0.5 * q_norm * q_norm < R; }
};

/// rho(z) = (1/2pi) sum_j (eF - lambda_j)_+ psi_j(z)^2, the q-integrated
/// density of 1_{(-inf, eF]}(T_q + V). Summation runs in ascending
/// eigenvalue order with compensated accumulation.
DensityProfile assemble_density(const SpectralDecomposition& spectrum, double epsilon_F);

/// Spectral data of the unperturbed fiber operator T_0 on a grid; it does not
/// depend on V, so solvers compute it once.
struct FreeReference {
  GridSpec grid;
  double epsilon_F;
  std::vector<double> eigenvalues;
  DensityProfile density;
};

FreeReference make_free_reference(const GridSpec& grid, double epsilon_F);

/// rho_Q = density(T_0 + V) - density(T_0), both on the same Dirichlet box.
DensityProfile renormalized_density(const PotentialProfile& V, double epsilon_F);
DensityProfile renormalized_density(const PotentialProfile& V, double epsilon_F, const FreeReference& free);

/// Renormalized kinetic free energy per unit area, in closed form:
///   (1/2pi) [ sum_{lambda_j <= eF} ((eF - lambda_j)(t_j - lambda_j) - (eF - lambda_j)^2 / 2)
///           + sum_{tau_k <= eF} (eF - tau_k)^2 / 2 ],
/// t_j = lambda_j - <psi_j, V psi_j>. The mu-integrand is piecewise linear
/// between eigenvalues, so this is exact.
double kinetic_free_energy(const PotentialProfile& V, double epsilon_F);
double kinetic_free_energy(const PotentialProfile& V, double epsilon_F, const FreeReference& free);
double kinetic_free_energy(const SpectralDecomposition& perturbed, const PotentialProfile& V,
                           std::span<const double> free_eigenvalues, double epsilon_F);

/// Brute-force radial midpoint quadrature of (2pi)^{-2} \int rho_{gamma_q} dq.
/// The default q-range is [0, sqrt(2 (eF - min(lambda_0, 0)))], which covers
/// every fiber with an occupied state. O(n_q) times dearer than
/// assemble_density; meant for validation.
DensityProfile oracle_density_quadrature(const PotentialProfile& V, double epsilon_F, int n_q);
DensityProfile oracle_density_quadrature(const PotentialProfile& V, double epsilon_F, int n_q, double q_min,
                                         double q_max);

}  // namespace fslab
