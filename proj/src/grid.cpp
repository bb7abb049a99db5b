#include "fermi_slab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fermi_slab/errors.hpp"

namespace fslab {

GridSpec::GridSpec(double half_length, int n_points)
    : half_length_(half_length), n_(n_points), h_(0.0) {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw InvalidArgument("grid half_length must be finite and > 0, got " + std::to_string(half_length));
  }
  if (n_points < 3 || n_points % 2 == 0) {
    throw InvalidArgument("grid n_points must be odd and >= 3, got " + std::to_string(n_points));
  }
  h_ = 2.0 * half_length / static_cast<double>(n_points - 1);
}

double GridSpec::node(int i) const noexcept {
  if (i == 0) return -half_length_;
  if (i == n_ - 1) return half_length_;
  return static_cast<double>(i - center()) * h_;
}

std::vector<double> GridSpec::nodes() const {
  std::vector<double> z(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) z[static_cast<std::size_t>(i)] = node(i);
  return z;
}

SampledProfile::SampledProfile(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size()) {
    throw GridMismatch("profile has " + std::to_string(values_.size()) + " samples, grid has " +
                       std::to_string(grid_.size()));
  }
}

double SampledProfile::mirror_asymmetry() const noexcept {
  double worst = 0.0;
  const int n = size();
  for (int i = 0; i < n / 2; ++i) {
    worst = std::max(worst, std::abs(values_[static_cast<std::size_t>(i)] -
                                     values_[static_cast<std::size_t>(n - 1 - i)]));
  }
  return worst;
}

DensityProfile::DensityProfile(GridSpec grid, std::vector<double> values)
    : SampledProfile(grid, std::move(values)) {}

DensityProfile DensityProfile::zeros(const GridSpec& grid) {
  return DensityProfile(grid, std::vector<double>(static_cast<std::size_t>(grid.size()), 0.0));
}

DensityProfile DensityProfile::scaled(double factor) const {
  std::vector<double> out(values_);
  for (auto& v : out) v *= factor;
  return DensityProfile(grid_, std::move(out));
}

DensityProfile operator+(const DensityProfile& a, const DensityProfile& b) {
  require_same_grid(a.grid(), b.grid(), "density sum");
  std::vector<double> out(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.values()[i];
  return DensityProfile(a.grid(), std::move(out));
}

DensityProfile operator-(const DensityProfile& a, const DensityProfile& b) {
  require_same_grid(a.grid(), b.grid(), "density difference");
  std::vector<double> out(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.values()[i];
  return DensityProfile(a.grid(), std::move(out));
}

PotentialProfile::PotentialProfile(GridSpec grid, std::vector<double> values)
    : SampledProfile(grid, std::move(values)), sup_norm_(0.0) {
  for (double v : values_) sup_norm_ = std::max(sup_norm_, std::abs(v));
}

PotentialProfile PotentialProfile::zeros(const GridSpec& grid) {
  return constant(grid, 0.0);
}

PotentialProfile PotentialProfile::constant(const GridSpec& grid, double value) {
  return PotentialProfile(grid, std::vector<double>(static_cast<std::size_t>(grid.size()), value));
}

PotentialProfile PotentialProfile::shifted(double c) const {
  std::vector<double> out(values_);
  for (auto& v : out) v += c;
  return PotentialProfile(grid_, std::move(out));
}

PotentialProfile operator-(const PotentialProfile& a, const PotentialProfile& b) {
  require_same_grid(a.grid(), b.grid(), "potential difference");
  std::vector<double> out(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.values()[i];
  return PotentialProfile(a.grid(), std::move(out));
}

PhysicalParams::PhysicalParams(double epsilon_F, double m)
    : epsilon_F_(epsilon_F), m_(m), rho0_(free_gas_density(epsilon_F)) {
  if (!(m >= 0.0) || !std::isfinite(m)) {
    throw InvalidArgument("interaction parameter m must be finite and >= 0, got " + std::to_string(m));
  }
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) {
    throw GridMismatch(std::string(what) + ": grids differ (L=" + std::to_string(a.half_length()) +
                       ", n=" + std::to_string(a.size()) + " vs L=" + std::to_string(b.half_length()) +
                       ", n=" + std::to_string(b.size()) + ")");
  }
}

double integrate(std::span<const double> values, double h) {
  if (values.empty()) return 0.0;
  double interior = 0.0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) interior += values[i];
  const double ends = 0.5 * (values.front() + (values.size() > 1 ? values.back() : 0.0));
  return h * (interior + ends);
}

double integrate(const SampledProfile& f) {
  return integrate(f.values(), f.grid().spacing());
}

double free_gas_density(double epsilon_F) {
  if (!(epsilon_F > 0.0) || !std::isfinite(epsilon_F)) {
    throw InvalidArgument("epsilon_F must be finite and > 0, got " + std::to_string(epsilon_F));
  }
  return std::pow(2.0 * epsilon_F, 1.5) / (6.0 * std::numbers::pi * std::numbers::pi);
}

double fermi_wavenumber(double epsilon_F) {
  if (!(epsilon_F > 0.0)) throw InvalidArgument("epsilon_F must be > 0");
  return std::sqrt(2.0 * epsilon_F);
}

DensityProfile trench_defect(const GridSpec& grid, double rho0, double w, double mollify_s) {
  if (!(w > 0.0) || !(w < grid.half_length())) {
    throw InvalidArgument("trench half-width w must satisfy 0 < w < L, got w=" + std::to_string(w) +
                          ", L=" + std::to_string(grid.half_length()));
  }
  if (!(mollify_s >= 0.0)) {
    throw InvalidArgument("mollify_s must be >= 0, got " + std::to_string(mollify_s));
  }
  std::vector<double> nu(static_cast<std::size_t>(grid.size()), 0.0);
  const double scale = mollify_s * std::numbers::sqrt2;
  const double h = grid.spacing();
  for (int i = 0; i < grid.size(); ++i) {
    // |z| keeps the profile bitwise even
    const double z = std::abs(grid.node(i));
    double indicator;
    if (mollify_s == 0.0) {
      // cell average over [z - h/2, z + h/2]; differs from the pointwise
      // indicator only on the node(s) within h/2 of the edge
      indicator = std::clamp((w - (z - 0.5 * h)) / h, 0.0, 1.0);
    } else {
      indicator = 0.5 * (std::erf((w - z) / scale) + std::erf((w + z) / scale));
    }
    nu[static_cast<std::size_t>(i)] = -rho0 * indicator;
  }
  return DensityProfile(grid, std::move(nu));
}

}  // namespace fslab
