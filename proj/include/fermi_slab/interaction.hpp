#pragma once

#include <optional>

#include "fermi_slab/grid.hpp"

namespace fslab {

/// Yukawa(m > 0) or Coulomb (m == 0, the D_0 := D convention).
class InteractionKind {
public:
  static InteractionKind yukawa(double m);
  static InteractionKind coulomb() { return InteractionKind(0.0); }
  /// m > 0 -> Yukawa, m == 0 -> Coulomb.
  static InteractionKind from_m(double m);

  bool is_coulomb() const noexcept { return m_ == 0.0; }
  double m() const noexcept { return m_; }

private:
  explicit InteractionKind(double m) : m_(m) {}
  double m_;
};

/// Solves -V'' + m^2 V = 2 rho with V(+-L) = 0, i.e. V = (e^{-m|.|}/m) * rho.
/// Warns when m L < 30 (the zero boundary value is then no longer exact).
PotentialProfile yukawa_solve(const DensityProfile& rho, double m);

struct CoulombOptions {
  /// Absolute neutrality tolerance; default 1e-6 * ||rho||_1.
  std::optional<double> neutrality_tol;
};

/// V(z) = -\int |z - z'| rho(z') dz' by trapezoid quadrature (solves
/// -V'' = 2 rho). Rejects non-neutral rho with NeutralityError.
PotentialProfile coulomb_solve(const DensityProfile& rho, const CoulombOptions& options = {});

/// D_m(rho1, rho2) = \int rho1 V[rho2] dz with V from the matching solve.
double dm_inner(const DensityProfile& rho1, const DensityProfile& rho2, const InteractionKind& kind,
                const CoulombOptions& options = {});

namespace detail {
/// yukawa_solve without the m L warning, for callers that check once.
PotentialProfile yukawa_solve_unchecked(const DensityProfile& rho, double m);
}  // namespace detail

}  // namespace fslab
