#include <doctest.h>

#include <cmath>

#include "fermi_slab/errors.hpp"
#include "fermi_slab/fermi.hpp"
#include "fermi_slab/spectral.hpp"
#include "oracles.hpp"

using namespace fslab;

namespace {

PotentialProfile gaussian_well(const GridSpec& g, double depth) {
  std::vector<double> v(static_cast<std::size_t>(g.size()), 0.0);
  for (int i = 1; i < g.size() - 1; ++i) v[static_cast<std::size_t>(i)] = -depth * std::exp(-g.node(i) * g.node(i));
  return PotentialProfile(g, std::move(v));
}

}  // namespace

TEST_SUITE("fermi") {
  TEST_CASE("QFiberSample") {
    const auto s = QFiberSample::at(2.0, 2.0);
    CHECK(s.effective_fermi == 0.0);
    CHECK(s.in_ball(2.5));
    CHECK_FALSE(s.in_ball(2.0));
    CHECK(QFiberSample::at(0.0, 2.0).effective_fermi == 2.0);
  }

  TEST_CASE("empty Fermi sea") {
    const GridSpec g(10.0, 201);
    const auto V = PotentialProfile::constant(g, 0.0).shifted(0.0);
    const auto s = eigendecompose(build_hamiltonian(g, V), 0.001);
    const auto rho = assemble_density(s, 0.001);
    for (double r : rho.values()) CHECK(r == 0.0);
  }

  TEST_CASE("cutoff below the Fermi level is rejected") {
    const GridSpec g(10.0, 201);
    const auto s = eigendecompose(build_hamiltonian(g, PotentialProfile::zeros(g)), 1.0);
    CHECK_THROWS_AS(assemble_density(s, 2.0), InvalidArgument);
  }

  TEST_CASE("free box reproduces the bulk density at the centre") {
    const GridSpec g(60.0, 2001);
    const auto ref = make_free_reference(g, 2.0);
    CHECK(std::abs(ref.density[g.center()] / free_gas_density(2.0) - 1.0) < 5e-3);
    for (double r : ref.density.values()) CHECK(r >= 0.0);
  }

  TEST_CASE("assembled density equals the dense q-quadrature") {
    const GridSpec g(12.0, 241);
    for (std::uint64_t seed : {4u, 5u}) {
      const auto V = oracle::random_smooth_potential(g, seed, 0.8);
      const auto s = eigendecompose(build_hamiltonian(g, V), 2.0);
      const auto fast = oracle::to_vector(assemble_density(s, 2.0));
      const auto slow = oracle::q_quadrature_density(g, oracle::to_vector(V), 2.0, 4000);
      CHECK(oracle::rel_l2(fast, slow) <= 1e-4);
      for (double r : fast) CHECK(r >= 0.0);
    }
  }

  TEST_CASE("library q-quadrature agrees with the dense oracle") {
    const GridSpec g(12.0, 241);
    const auto V = oracle::random_potential(g, 17, 1.0);
    const auto lib = oracle::to_vector(oracle_density_quadrature(V, 2.0, 500));
    const auto dense = oracle::q_quadrature_density(g, oracle::to_vector(V), 2.0, 500);
    CHECK(oracle::rel_l2(lib, dense) <= 1e-10);
    CHECK_THROWS_AS(oracle_density_quadrature(V, 2.0, 1), InvalidArgument);
  }

  TEST_CASE("renormalized density: zero, symmetry, bound charge") {
    const GridSpec g(30.0, 1201);
    const auto zero = renormalized_density(PotentialProfile::zeros(g), 2.0);
    for (double r : zero.values()) CHECK(r == 0.0);

    const auto well = gaussian_well(g, 0.5);
    const auto rq = renormalized_density(well, 2.0);
    CHECK(rq.mirror_asymmetry() <= 1e-10);
    const double charge = integrate(rq);
    CHECK(charge > 0.0);

    const auto free = oracle::q_quadrature_density(g, std::vector<double>(1201, 0.0), 2.0, 4000);
    const auto pert = oracle::q_quadrature_density(g, oracle::to_vector(well), 2.0, 4000);
    std::vector<double> diff(pert.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = pert[i] - free[i];
    CHECK(std::abs(integrate(diff, g.spacing()) - charge) <= 1e-4 * std::abs(charge) + 1e-4);
  }

  TEST_CASE("fibers beyond eF + c_V contribute nothing") {
    const GridSpec g(20.0, 401);
    const auto V = oracle::random_smooth_potential(g, 23, 0.6);
    const double q_min = std::sqrt(2.0 * (2.0 + V.sup_norm()));
    const auto rho = oracle_density_quadrature(V, 2.0, 200, q_min, q_min + 2.0);
    for (double r : rho.values()) CHECK(r == 0.0);
  }

  TEST_CASE("kinetic free energy: zero potential") {
    const GridSpec g(20.0, 401);
    CHECK(kinetic_free_energy(PotentialProfile::zeros(g), 2.0) == 0.0);
  }

  TEST_CASE("kinetic free energy: constant potential against mu-quadrature") {
    const GridSpec g(10.0, 201);
    std::vector<double> v(201, 0.3);
    v.front() = v.back() = 0.0;
    const PotentialProfile V(g, v);
    const double closed = kinetic_free_energy(V, 2.0);
    const double oracle = oracle::kinetic_mu_quadrature(g, v, 2.0);
    CHECK(closed >= 0.0);
    CHECK(std::abs(closed - oracle) <= 1e-8 * std::abs(oracle));
  }

  TEST_CASE("kinetic free energy: seeded potentials are non-negative and match mu-quadrature") {
    const GridSpec g(10.0, 201);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto V = seed % 2 ? oracle::random_potential(g, seed, 1.0) : oracle::random_smooth_potential(g, seed, 1.0);
      const double closed = kinetic_free_energy(V, 2.0);
      const double oracle = oracle::kinetic_mu_quadrature(g, oracle::to_vector(V), 2.0);
      CHECK(closed >= -1e-12 * (1.0 + std::abs(closed)));
      CHECK(std::abs(closed - oracle) <= 1e-8 * std::abs(oracle));
    }
  }

  TEST_CASE("free reference built for another Fermi level is rejected") {
    const GridSpec g(10.0, 201);
    const auto ref = make_free_reference(g, 1.0);
    CHECK_THROWS_AS(renormalized_density(PotentialProfile::zeros(g), 2.0, ref), InvalidArgument);
  }
}
