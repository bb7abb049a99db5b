#pragma once

// Reference computations used by the tests. They deliberately avoid the
// library's own algorithms: dense eigensolves instead of Sturm bisection,
// explicit quadratures instead of closed forms.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "fermi_slab/grid.hpp"

namespace oracle {

constexpr double kPi = std::numbers::pi;

struct DenseSpectrum {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> vectors;  // full grid, h-normalized
};

inline Eigen::MatrixXd dense_hamiltonian(const fslab::GridSpec& grid, const std::vector<double>& V) {
  const int n = grid.size() - 2;
  const double h = grid.spacing();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    H(k, k) = 1.0 / (h * h) + V[static_cast<std::size_t>(k + 1)];
    if (k + 1 < n) H(k, k + 1) = H(k + 1, k) = -0.5 / (h * h);
  }
  return H;
}

inline DenseSpectrum dense_spectrum(const fslab::GridSpec& grid, const std::vector<double>& V, double cutoff) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_hamiltonian(grid, V));
  DenseSpectrum out;
  const double h = grid.spacing();
  for (int j = 0; j < es.eigenvalues().size(); ++j) {
    if (es.eigenvalues()(j) > cutoff) break;
    out.eigenvalues.push_back(es.eigenvalues()(j));
    std::vector<double> psi(static_cast<std::size_t>(grid.size()), 0.0);
    for (int k = 0; k < es.eigenvalues().size(); ++k) psi[static_cast<std::size_t>(k + 1)] = es.eigenvectors()(k, j) / std::sqrt(h);
    out.vectors.push_back(std::move(psi));
  }
  return out;
}

/// (2 pi)^{-2} \int_{R^2} rho_{1(T_q + V <= eF)} dq by midpoint quadrature in |q|,
/// each fiber built from a dense eigensolve of the shifted operator.
inline std::vector<double> q_quadrature_density(const fslab::GridSpec& grid, const std::vector<double>& V, double eF,
                                                int n_q) {
  const auto spectrum = dense_spectrum(grid, V, eF);
  const double lowest = spectrum.eigenvalues.empty() ? 0.0 : std::min(spectrum.eigenvalues.front(), 0.0);
  const double q_max = std::sqrt(2.0 * (eF - lowest));
  const double dq = q_max / n_q;
  std::vector<double> rho(static_cast<std::size_t>(grid.size()), 0.0);
  for (int k = 0; k < n_q; ++k) {
    const double q = (k + 0.5) * dq;
    for (std::size_t j = 0; j < spectrum.eigenvalues.size(); ++j) {
      if (spectrum.eigenvalues[j] + 0.5 * q * q > eF) break;
      for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += q * dq / (2 * kPi) * spectrum.vectors[j][i] * spectrum.vectors[j][i];
    }
  }
  return rho;
}

/// (1/2pi) \int_{-inf}^{eF} Tr[(T0 - mu)(P_mu(T0 + V) - P_mu(T0))] dmu with
/// dense projectors and 4-point Gauss-Legendre between eigenvalue breakpoints.
inline double kinetic_mu_quadrature(const fslab::GridSpec& grid, const std::vector<double>& V, double eF) {
  const std::vector<double> zero(V.size(), 0.0);
  const Eigen::MatrixXd T0 = dense_hamiltonian(grid, zero);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pert(dense_hamiltonian(grid, V));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> free(T0);
  const int n = static_cast<int>(T0.rows());
  // <psi_j, T0 psi_j> and tau_k for every pair below eF
  std::vector<std::pair<double, double>> occ_pert, occ_free;
  for (int j = 0; j < n && pert.eigenvalues()(j) <= eF; ++j) {
    const Eigen::VectorXd v = pert.eigenvectors().col(j);
    occ_pert.emplace_back(pert.eigenvalues()(j), v.dot(T0 * v));
  }
  for (int j = 0; j < n && free.eigenvalues()(j) <= eF; ++j) {
    occ_free.emplace_back(free.eigenvalues()(j), free.eigenvalues()(j));
  }
  auto trace = [&](double mu) {
    double t = 0.0;
    for (const auto& [lam, kin] : occ_pert) {
      if (lam <= mu) t += kin - mu;
    }
    for (const auto& [tau, kin] : occ_free) {
      if (tau <= mu) t -= kin - mu;
    }
    return t;
  };
  std::vector<double> br;
  for (const auto& p : occ_pert) br.push_back(p.first);
  for (const auto& p : occ_free) br.push_back(p.first);
  br.push_back(eF);
  std::sort(br.begin(), br.end());
  const double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
  const double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < br.size(); ++s) {
    const double a = br[s], b = br[s + 1];
    if (!(b > a)) continue;
    for (int g = 0; g < 4; ++g) total += 0.5 * (b - a) * w[g] * trace(0.5 * (a + b) + 0.5 * (b - a) * x[g]);
  }
  return total / (2 * kPi);
}

/// Composite Simpson rule of f on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// 2 \int |rho_hat(k)|^2 / (k^2 + m^2) dk for a standard normal rho, with the
/// unitary transform rho_hat(k) = e^{-k^2/2} / sqrt(2 pi).
inline double fourier_dm_standard_normal(double m) {
  return simpson([m](double k) { return 2.0 * std::exp(-k * k) / (2 * kPi * (k * k + m * m)); }, -40.0, 40.0,
                 400000);
}

/// Direct trapezoid quadrature of (e^{-m|z - z'|}/m) rho(z') at one point.
inline double yukawa_convolution_at(const fslab::GridSpec& grid, const std::vector<double>& rho, double m, double z) {
  double acc = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double w = (i == 0 || i == grid.size() - 1) ? 0.5 : 1.0;
    acc += w * std::exp(-m * std::abs(z - grid.node(i))) / m * rho[static_cast<std::size_t>(i)];
  }
  return acc * grid.spacing();
}

inline std::vector<double> uniform_samples(std::uint64_t seed, int n, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& x : out) x = u(rng);
  return out;
}

/// iid uniform(-amplitude, amplitude) node values, zero on the Dirichlet nodes.
inline fslab::PotentialProfile random_potential(const fslab::GridSpec& grid, std::uint64_t seed, double amplitude) {
  auto v = uniform_samples(seed, grid.size(), -amplitude, amplitude);
  v.front() = 0.0;
  v.back() = 0.0;
  return fslab::PotentialProfile(grid, std::move(v));
}

/// Smooth random potential: a few Gaussian bumps with seeded centres, widths and heights.
inline fslab::PotentialProfile random_smooth_potential(const fslab::GridSpec& grid, std::uint64_t seed,
                                                       double amplitude) {
  const auto p = uniform_samples(seed, 12, 0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(grid.size()), 0.0);
  const double L = grid.half_length();
  for (int b = 0; b < 4; ++b) {
    const double c = (p[3 * b] - 0.5) * L;
    const double s = 0.5 + 2.0 * p[3 * b + 1];
    const double a = amplitude * (2.0 * p[3 * b + 2] - 1.0);
    for (int i = 1; i < grid.size() - 1; ++i) {
      const double z = grid.node(i);
      v[static_cast<std::size_t>(i)] += a * std::exp(-(z - c) * (z - c) / (2 * s * s));
    }
  }
  return fslab::PotentialProfile(grid, std::move(v));
}

inline double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

inline std::vector<double> to_vector(const fslab::SampledProfile& p) { return {p.values().begin(), p.values().end()}; }

}  // namespace oracle
