#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fermi_slab/errors.hpp"
#include "fermi_slab/grid.hpp"
#include "fermi_slab/scf.hpp"

namespace fslab {

struct FriedelWindow {
  double z_lo;
  double z_hi;

  /// [w + 4, L - 10]
  static FriedelWindow defaults(double defect_half_width, double half_length) {
    return {defect_half_width + 4.0, half_length - 10.0};
  }
};

struct FriedelOptions {
  bool free_exponent = false;
  /// When set, the window must start beyond defect_half_width + 2.
  std::optional<double> defect_half_width;
  /// Scan range for eps; default [0.5, 1.5] * k_F with k_F from rho0.
  std::optional<std::pair<double, double>> eps_range;
};

/// Fit of rho(z) - rho0 = a cos(2 eps z + delta) / |z|^3 on the window (z > 0 side).
struct FriedelFit {
  double a = 0.0;
  double delta = 0.0;  // in (-pi, pi]
  double eps = 0.0;
  double eps_over_kF = 0.0;  // eps / sqrt(2 eF), eF recovered from rho0
  FriedelWindow window{};
  double rms_residual = 0.0;  // in density units
  int samples = 0;
  bool degenerate = false;
  std::optional<double> decay_exponent;  // p in |z|^{-p}, from the demodulated envelope
};

FriedelFit friedel_fit(const DensityProfile& total_density, double rho0, const FriedelWindow& window,
                       const FriedelOptions& options = {});

struct MSweepEntry {
  double m;
  double I;
  double charge;
  int iterations;
  ScfResult result;
};

struct MSweepReport {
  std::vector<MSweepEntry> entries;
  double extrapolated_I0 = 0.0;
  /// min_k (I_{k+1} - I_k); +inf for fewer than two entries.
  double monotonicity_margin = 0.0;
  bool monotone = true;  // margin >= -1e-10
  bool charge_strictly_decreasing = true;
};

/// Thrown by sweep_m when a solve fails; holds the entries completed so far.
class SweepAborted : public NonConvergence {
public:
  SweepAborted(const std::string& what, std::vector<double> residual_history, MSweepReport partial, double failed_m)
      : NonConvergence(what, std::move(residual_history)), partial_(std::move(partial)), failed_m_(failed_m) {}
  const MSweepReport& partial() const noexcept { return partial_; }
  double failed_m() const noexcept { return failed_m_; }

private:
  MSweepReport partial_;
  double failed_m_;
};

/// Richardson estimate of lim_{m->0} I from the last (up to) three points,
/// polynomial in m^2 evaluated at 0.
double extrapolate_to_zero_m(const std::vector<double>& ms, const std::vector<double>& Is);

/// Runs scf_solve for each m of a strictly decreasing list, warm starting
/// from the previous V_final.
MSweepReport sweep_m(const DensityProfile& nu, double epsilon_F, const std::vector<double>& m_list,
                     const ScfConfig& cfg = {});

/// Grid of half-length ~approx_L whose spacing puts 8 nodes on a quarter
/// wavelength of the lattice Fermi wave: 2 k_h (8 h) = pi, with
/// (1 - cos(k_h h)) / h^2 = eF.
GridSpec antiphase_grid(double epsilon_F, double approx_L);

/// Two self-consistent solves, on antiphase_grid(eF, approx_L) and on the
/// same spacing with 8 more nodes per side. The standing wave reflected by
/// the Dirichlet walls then arrives in antiphase, and averaging rho_Q on the
/// common nodes cancels it to leading order.
struct BoxAveragedState {
  DensityProfile nu;     // on the inner grid
  DensityProfile rho_Q;  // average of the two boxes, on the inner grid
  ScfResult inner;
  ScfResult outer;

  DensityProfile total_density(double rho0) const;
};

BoxAveragedState box_averaged_state(const std::function<DensityProfile(const GridSpec&)>& make_defect,
                                    const PhysicalParams& params, double approx_L, const ScfConfig& cfg = {});

struct NeutralityReport {
  double charge;          // trapezoid \int (rho_Q - nu)
  double error_estimate;  // |trapezoid - Simpson|
};

NeutralityReport neutrality_report(const ScfResult& result);
NeutralityReport neutrality_report(const DensityProfile& rho_Q, const DensityProfile& nu);

}  // namespace fslab
