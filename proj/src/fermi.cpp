#include "fermi_slab/fermi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fermi_slab/errors.hpp"

namespace fslab {
namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

// Neumaier-compensated accumulation of w_j * psi_j(z_i)^2 over j, per node.
std::vector<double> weighted_square_sum(const SpectralDecomposition& spectrum, std::span<const double> weights) {
  const auto n = static_cast<std::size_t>(spectrum.grid().size());
  std::vector<double> sum(n, 0.0), comp(n, 0.0);
  for (int j = 0; j < spectrum.count(); ++j) {
    const double w = weights[static_cast<std::size_t>(j)];
    if (w == 0.0) continue;
    const auto psi = spectrum.eigenvector(j);
    for (std::size_t i = 0; i < n; ++i) {
      const double term = w * psi[i] * psi[i];
      const double t = sum[i] + term;
      comp[i] += std::abs(sum[i]) >= std::abs(term) ? (sum[i] - t) + term : (term - t) + sum[i];
      sum[i] = t;
    }
  }
  for (std::size_t i = 0; i < n; ++i) sum[i] += comp[i];
  return sum;
}

SpectralDecomposition fiber_spectrum(const PotentialProfile& V, double epsilon_F) {
  return eigendecompose(build_hamiltonian(V.grid(), V), epsilon_F);
}

void check_reference(const FreeReference& free, const GridSpec& grid, double epsilon_F) {
  require_same_grid(free.grid, grid, "free reference");
  if (free.epsilon_F != epsilon_F) {
    throw InvalidArgument("free reference was built for a different Fermi level");
  }
}

}  // namespace

DensityProfile assemble_density(const SpectralDecomposition& spectrum, double epsilon_F) {
  if (spectrum.cutoff() < epsilon_F) {
    throw InvalidArgument("assemble_density: spectral cutoff " + std::to_string(spectrum.cutoff()) +
                          " is below the Fermi level " + std::to_string(epsilon_F) +
                          "; occupied states would be missing");
  }
  std::vector<double> weights(static_cast<std::size_t>(spectrum.count()));
  for (int j = 0; j < spectrum.count(); ++j) {
    weights[static_cast<std::size_t>(j)] = std::max(0.0, epsilon_F - spectrum.eigenvalue(j)) * kInvTwoPi;
  }
  return DensityProfile(spectrum.grid(), weighted_square_sum(spectrum, weights));
}

FreeReference make_free_reference(const GridSpec& grid, double epsilon_F) {
  const auto spectrum = fiber_spectrum(PotentialProfile::zeros(grid), epsilon_F);
  auto density = assemble_density(spectrum, epsilon_F);
  return FreeReference{grid, epsilon_F,
                       std::vector<double>(spectrum.eigenvalues().begin(), spectrum.eigenvalues().end()),
                       std::move(density)};
}

DensityProfile renormalized_density(const PotentialProfile& V, double epsilon_F) {
  return renormalized_density(V, epsilon_F, make_free_reference(V.grid(), epsilon_F));
}

DensityProfile renormalized_density(const PotentialProfile& V, double epsilon_F, const FreeReference& free) {
  check_reference(free, V.grid(), epsilon_F);
  return assemble_density(fiber_spectrum(V, epsilon_F), epsilon_F) - free.density;
}

double kinetic_free_energy(const SpectralDecomposition& perturbed, const PotentialProfile& V,
                           std::span<const double> free_eigenvalues, double epsilon_F) {
  require_same_grid(perturbed.grid(), V.grid(), "kinetic_free_energy");
  const double h = V.grid().spacing();
  double perturbed_sum = 0.0;
  for (int j = 0; j < perturbed.count(); ++j) {
    const double lambda = perturbed.eigenvalue(j);
    if (lambda > epsilon_F) break;
    const auto psi = perturbed.eigenvector(j);
    double potential_energy = 0.0;
    for (int i = 0; i < V.size(); ++i) potential_energy += psi[static_cast<std::size_t>(i)] *
                                                            psi[static_cast<std::size_t>(i)] * V[i];
    const double t = lambda - h * potential_energy;
    const double occ = epsilon_F - lambda;
    perturbed_sum += occ * (t - lambda) - 0.5 * occ * occ;
  }
  double free_sum = 0.0;
  for (double tau : free_eigenvalues) {
    if (tau > epsilon_F) break;
    free_sum += 0.5 * (epsilon_F - tau) * (epsilon_F - tau);
  }
  return kInvTwoPi * (perturbed_sum + free_sum);
}

double kinetic_free_energy(const PotentialProfile& V, double epsilon_F) {
  return kinetic_free_energy(V, epsilon_F, make_free_reference(V.grid(), epsilon_F));
}

double kinetic_free_energy(const PotentialProfile& V, double epsilon_F, const FreeReference& free) {
  check_reference(free, V.grid(), epsilon_F);
  return kinetic_free_energy(fiber_spectrum(V, epsilon_F), V, free.eigenvalues, epsilon_F);
}

DensityProfile oracle_density_quadrature(const PotentialProfile& V, double epsilon_F, int n_q) {
  const auto spectrum = fiber_spectrum(V, epsilon_F);
  const double lowest = spectrum.empty() ? 0.0 : std::min(spectrum.eigenvalue(0), 0.0);
  return oracle_density_quadrature(V, epsilon_F, n_q, 0.0, std::sqrt(2.0 * (epsilon_F - lowest)));
}

DensityProfile oracle_density_quadrature(const PotentialProfile& V, double epsilon_F, int n_q, double q_min,
                                         double q_max) {
  if (n_q < 2) throw InvalidArgument("oracle_density_quadrature: n_q must be >= 2");
  if (!(q_min >= 0.0) || !(q_max > q_min)) {
    throw InvalidArgument("oracle_density_quadrature: need 0 <= q_min < q_max");
  }
  const auto spectrum = fiber_spectrum(V, epsilon_F);
  const auto n = static_cast<std::size_t>(V.grid().size());
  const double dq = (q_max - q_min) / n_q;
  std::vector<double> rho(n, 0.0);
  std::vector<double> fiber(n);
  for (int k = 0; k < n_q; ++k) {
    const auto sample = QFiberSample::at(q_min + (k + 0.5) * dq, epsilon_F);
    std::fill(fiber.begin(), fiber.end(), 0.0);
    for (int j = 0; j < spectrum.count() && spectrum.eigenvalue(j) <= sample.effective_fermi; ++j) {
      const auto psi = spectrum.eigenvector(j);
      for (std::size_t i = 0; i < n; ++i) fiber[i] += psi[i] * psi[i];
    }
    const double weight = kInvTwoPi * sample.q_norm * dq;
    for (std::size_t i = 0; i < n; ++i) rho[i] += weight * fiber[i];
  }
  return DensityProfile(V.grid(), std::move(rho));
}

}  // namespace fslab
