#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fermi_slab/grid.hpp"

namespace fslab {

/// Second-order finite-difference discretization of -1/2 d^2/dz^2 + V on the
/// interior nodes 1..n-2 (Dirichlet rows eliminated). Row k of the matrix
/// corresponds to grid node k+1.
class FiberHamiltonian {
public:
  FiberHamiltonian(const GridSpec& grid, PotentialProfile potential);

  const GridSpec& grid() const noexcept { return potential_.grid(); }
  const PotentialProfile& potential() const noexcept { return potential_; }
  int dimension() const noexcept { return static_cast<int>(diagonal_.size()); }
  std::span<const double> diagonal() const noexcept { return diagonal_; }
  double off_diagonal() const noexcept { return off_diagonal_; }

  /// Gershgorin interval containing the whole spectrum.
  std::pair<double, double> gershgorin_bounds() const noexcept;
  /// max(|lower|, |upper|) of the Gershgorin interval.
  double scale() const noexcept;

  /// y = H x on interior vectors of length dimension().
  void apply(std::span<const double> x, std::span<double> y) const;

private:
  PotentialProfile potential_;
  std::vector<double> diagonal_;
  double off_diagonal_;
};

FiberHamiltonian build_hamiltonian(const GridSpec& grid, const PotentialProfile& V);

/// Number of eigenvalues strictly below x (Sturm sequence / LDL^T inertia).
int sturm_count(const FiberHamiltonian& H, double x);

/// Number of eigenvalues <= x.
int count_at_or_below(const FiberHamiltonian& H, double x);

/// Eigenpairs with eigenvalue <= cutoff, ascending. Eigenvectors are stored
/// on the full grid (zero at the Dirichlet nodes) and normalized so that
/// h * sum_i psi(z_i)^2 = 1.
class SpectralDecomposition {
public:
  SpectralDecomposition(GridSpec grid, double cutoff, std::vector<double> eigenvalues,
                        std::vector<double> eigenvectors, int cluster_fallbacks = 0);

  const GridSpec& grid() const noexcept { return grid_; }
  double cutoff() const noexcept { return cutoff_; }
  int count() const noexcept { return static_cast<int>(eigenvalues_.size()); }
  bool empty() const noexcept { return eigenvalues_.empty(); }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  double eigenvalue(int j) const noexcept { return eigenvalues_[static_cast<std::size_t>(j)]; }
  std::span<const double> eigenvector(int j) const noexcept;
  /// Number of near-degenerate clusters that needed the dense Rayleigh-Ritz repair.
  int cluster_fallbacks() const noexcept { return cluster_fallbacks_; }

private:
  GridSpec grid_;
  double cutoff_;
  std::vector<double> eigenvalues_;
  std::vector<double> eigenvectors_;
  int cluster_fallbacks_;
};

/// Bisection on Sturm counts to locate every eigenvalue <= cutoff, then
/// inverse iteration for the eigenvectors. Eigenvalues closer than
/// 1e-10 * scale are treated as a degenerate cluster and repaired by a small
/// dense Rayleigh-Ritz step. Throws SpectralFailure if that also fails.
SpectralDecomposition eigendecompose(const FiberHamiltonian& H, double cutoff);

}  // namespace fslab
