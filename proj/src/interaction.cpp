#include "fermi_slab/interaction.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fermi_slab/errors.hpp"
#include "fermi_slab/log.hpp"

namespace fslab {

InteractionKind InteractionKind::yukawa(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw InvalidArgument("Yukawa interaction needs m > 0, got " + std::to_string(m));
  }
  return InteractionKind(m);
}

InteractionKind InteractionKind::from_m(double m) {
  if (m == 0.0) return coulomb();
  return yukawa(m);
}

PotentialProfile yukawa_solve(const DensityProfile& rho, double m) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw InvalidArgument("yukawa_solve needs m > 0 (use coulomb_solve for m = 0), got " + std::to_string(m));
  }
  const GridSpec& grid = rho.grid();
  if (m * grid.half_length() < 30.0) {
    std::ostringstream msg;
    msg << "yukawa_solve: m*L = " << m * grid.half_length()
        << " < 30; the Dirichlet condition V(+-L) = 0 truncates the Green's kernel tail";
    log::warn(msg.str());
  }
  return detail::yukawa_solve_unchecked(rho, m);
}

PotentialProfile detail::yukawa_solve_unchecked(const DensityProfile& rho, double m) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw InvalidArgument("yukawa_solve needs m > 0, got " + std::to_string(m));
  }
  const GridSpec& grid = rho.grid();
  const int n = grid.size();
  const auto interior = static_cast<std::size_t>(n - 2);
  const double h = grid.spacing();
  const double off = -1.0 / (h * h);
  const double diag = 2.0 / (h * h) + m * m;

  // Thomas algorithm; the matrix is diagonally dominant.
  std::vector<double> c_prime(interior), d_prime(interior);
  for (std::size_t k = 0; k < interior; ++k) {
    const double rhs = 2.0 * rho[static_cast<int>(k) + 1];
    const double denom = k == 0 ? diag : diag - off * c_prime[k - 1];
    c_prime[k] = off / denom;
    d_prime[k] = (k == 0 ? rhs : rhs - off * d_prime[k - 1]) / denom;
  }
  std::vector<double> V(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = interior; k-- > 0;) {
    const double next = k + 1 < interior ? V[k + 2] : 0.0;
    V[k + 1] = d_prime[k] - c_prime[k] * next;
  }
  return PotentialProfile(grid, std::move(V));
}

PotentialProfile coulomb_solve(const DensityProfile& rho, const CoulombOptions& options) {
  const GridSpec& grid = rho.grid();
  const int n = grid.size();
  const double h = grid.spacing();
  double l1 = 0.0;
  for (double v : rho.values()) l1 += std::abs(v);
  l1 *= h;
  const double total = integrate(rho);
  const double tol = options.neutrality_tol.value_or(1e-6 * l1);
  if (std::abs(total) > tol) {
    std::ostringstream msg;
    msg << "coulomb_solve: charge density is not neutral (total charge " << total << ", tolerance " << tol
        << ")";
    throw NeutralityError(msg.str(), total);
  }

  // V_i = -sum_j w_j |z_i - z_j| rho_j with trapezoid weights, via prefix sums:
  // V_i = -(z_i A_i - B_i) + (z_i (A - A_i) - (B - B_i)).
  std::vector<double> wq(static_cast<std::size_t>(n)), wzq(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
    wq[static_cast<std::size_t>(j)] = w * rho[j];
    wzq[static_cast<std::size_t>(j)] = w * rho[j] * grid.node(j);
  }
  double a_total = 0.0, b_total = 0.0;
  for (int j = 0; j < n; ++j) {
    a_total += wq[static_cast<std::size_t>(j)];
    b_total += wzq[static_cast<std::size_t>(j)];
  }
  std::vector<double> V(static_cast<std::size_t>(n));
  double a = 0.0, b = 0.0;
  for (int i = 0; i < n; ++i) {
    a += wq[static_cast<std::size_t>(i)];
    b += wzq[static_cast<std::size_t>(i)];
    const double z = grid.node(i);
    V[static_cast<std::size_t>(i)] = -(z * a - b) + (z * (a_total - a) - (b_total - b));
  }
  return PotentialProfile(grid, std::move(V));
}

double dm_inner(const DensityProfile& rho1, const DensityProfile& rho2, const InteractionKind& kind,
                const CoulombOptions& options) {
  require_same_grid(rho1.grid(), rho2.grid(), "dm_inner");
  if (kind.is_coulomb()) {
    // both arguments must be neutral
    (void)coulomb_solve(rho1, options);
  }
  const PotentialProfile V = kind.is_coulomb() ? coulomb_solve(rho2, options) : yukawa_solve(rho2, kind.m());
  std::vector<double> product(static_cast<std::size_t>(rho1.size()));
  for (int i = 0; i < rho1.size(); ++i) product[static_cast<std::size_t>(i)] = rho1[i] * V[i];
  return integrate(product, rho1.grid().spacing());
}

}  // namespace fslab
