#pragma once

#include <span>
#include <vector>

namespace fslab {

enum class BoundaryCondition { Dirichlet };

/// Uniform grid on the transverse axis, z_i = -L + i*h, i = 0..n-1.
/// n is odd so the centre node is exactly z = 0, and node(n-1-i) == -node(i)
/// holds bitwise.
class GridSpec {
public:
  GridSpec(double half_length, int n_points);

  double half_length() const noexcept { return half_length_; }
  int size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  int center() const noexcept { return (n_ - 1) / 2; }
  BoundaryCondition boundary() const noexcept { return BoundaryCondition::Dirichlet; }

  double node(int i) const noexcept;
  std::vector<double> nodes() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
  double half_length_;
  int n_;
  double h_;
};

/// Immutable function sampled on a GridSpec.
class SampledProfile {
public:
  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  double operator[](int i) const noexcept { return values_[static_cast<std::size_t>(i)]; }

  /// max_i |f(z_i) - f(-z_i)|
  double mirror_asymmetry() const noexcept;

protected:
  SampledProfile(GridSpec grid, std::vector<double> values);

  GridSpec grid_;
  std::vector<double> values_;
};

/// Charge density per unit volume, signed.
class DensityProfile : public SampledProfile {
public:
  DensityProfile(GridSpec grid, std::vector<double> values);
  static DensityProfile zeros(const GridSpec& grid);

  DensityProfile scaled(double factor) const;
  friend DensityProfile operator+(const DensityProfile& a, const DensityProfile& b);
  friend DensityProfile operator-(const DensityProfile& a, const DensityProfile& b);
};

/// Mean-field potential; caches c_V = max_i |V(z_i)|.
class PotentialProfile : public SampledProfile {
public:
  PotentialProfile(GridSpec grid, std::vector<double> values);
  static PotentialProfile zeros(const GridSpec& grid);
  static PotentialProfile constant(const GridSpec& grid, double value);

  double sup_norm() const noexcept { return sup_norm_; }

  PotentialProfile shifted(double c) const;
  friend PotentialProfile operator-(const PotentialProfile& a, const PotentialProfile& b);

private:
  double sup_norm_;
};

/// Fermi level and interaction parameter. rho0 is always derived from
/// epsilon_F. m == 0 flags the Coulomb limit.
class PhysicalParams {
public:
  PhysicalParams(double epsilon_F, double m);

  double epsilon_F() const noexcept { return epsilon_F_; }
  double m() const noexcept { return m_; }
  double rho0() const noexcept { return rho0_; }
  bool coulomb() const noexcept { return m_ == 0.0; }

private:
  double epsilon_F_;
  double m_;
  double rho0_;
};

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

/// Trapezoid rule h*(f0/2 + f1 + ... + f_{n-2} + f_{n-1}/2).
double integrate(const SampledProfile& f);
double integrate(std::span<const double> values, double h);

/// Bulk density of the free gas at Fermi level epsilon_F: (2 eF)^{3/2} / (6 pi^2).
double free_gas_density(double epsilon_F);

/// Fermi wavenumber sqrt(2 eF).
double fermi_wavenumber(double epsilon_F);

/// nu(z) = -rho0 * 1_{|z| <= w}, optionally convolved with a unit-mass
/// Gaussian of standard deviation mollify_s (closed form via erf).
DensityProfile trench_defect(const GridSpec& grid, double rho0, double w, double mollify_s = 0.0);

}  // namespace fslab
