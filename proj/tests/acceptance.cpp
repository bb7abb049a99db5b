// Acceptance run: one PASS/FAIL line per criterion A1..A10.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fermi_slab/analysis.hpp"
#include "fermi_slab/fermi.hpp"
#include "fermi_slab/interaction.hpp"
#include "fermi_slab/log.hpp"
#include "fermi_slab/scf.hpp"
#include "oracles.hpp"

using namespace fslab;
namespace fs = std::filesystem;

namespace {

constexpr double kEF = 2.0;
constexpr double kW = 4.0;

int failures = 0;

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(const char* id, bool ok, const std::string& detail) {
  std::printf("%s %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& text) {
  std::printf("   info: %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double sup_diff(const SampledProfile& a, const SampledProfile& b) {
  double d = 0.0;
  for (int i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

DensityProfile trench(const GridSpec& g) { return trench_defect(g, free_gas_density(kEF), kW); }

// A1
void free_gas_plateau() {
  const Stopwatch t;
  const GridSpec g(60.0, 2001);
  const auto ref = make_free_reference(g, kEF);
  const auto rho_Q = renormalized_density(PotentialProfile::zeros(g), kEF, ref);
  const double rho0 = free_gas_density(kEF);
  double plateau = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    if (std::abs(g.node(i)) <= 5.0) plateau = std::max(plateau, std::abs(ref.density[i] / rho0 - 1.0));
  }
  double rq = 0.0;
  for (double v : rho_Q.values()) rq = std::max(rq, std::abs(v));
  const double secs = t.seconds();
  report("A1", plateau <= 5e-3 && rq <= 1e-12 && secs < 5.0,
         fmt("plateau rel err %.3e (tol 5e-3), max|rho_Q| %.1e (tol 1e-12), %.2f s (limit 5 s)", plateau, rq, secs));
}

// A2
void oracle_equivalence() {
  const Stopwatch t;
  const GridSpec g(20.0, 801);
  const auto V = oracle::random_potential(g, 7, 1.0);
  const auto fast = oracle::to_vector(assemble_density(eigendecompose(build_hamiltonian(g, V), kEF), kEF));
  std::vector<double> logn, loge;
  double e4000 = 0.0, e8000 = 0.0;
  for (int k = 0; k <= 7; ++k) {
    const int n_q = 250 << k;
    const double e = oracle::rel_l2(oracle::to_vector(oracle_density_quadrature(V, kEF, n_q)), fast);
    if (n_q == 4000) e4000 = e;
    if (n_q == 8000) e8000 = e;
    logn.push_back(std::log(n_q));
    loge.push_back(std::log(e));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < logn.size(); ++i) {
    mx += logn[i] / logn.size();
    my += loge[i] / logn.size();
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < logn.size(); ++i) {
    sxy += (logn[i] - mx) * (loge[i] - my);
    sxx += (logn[i] - mx) * (logn[i] - mx);
  }
  const double ratio = e4000 / e8000;
  const double slope_ratio = std::pow(2.0, -sxy / sxx);
  const double secs = t.seconds();
  report("A2", e4000 <= 1e-4 && ratio >= 1.7 && ratio <= 2.3 && secs < 60.0,
         fmt("rel L2 at n_q=4000 %.3e (tol 1e-4), ratio 4000->8000 %.3f (band [1.7, 2.3]), %.1f s (limit 60 s)",
             e4000, ratio, secs));
  info(fmt("per-doubling ratio from a log-log fit over n_q = 250..32000: %.3f", slope_ratio));
}

// A3
void kinetic_positivity() {
  const Stopwatch t;
  const GridSpec g(20.0, 401);
  double worst = std::numeric_limits<double>::infinity(), max_rel = 0.0;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto V = seed % 2 ? oracle::random_potential(g, seed, 1.5) : oracle::random_smooth_potential(g, seed, 1.5);
    const double T = kinetic_free_energy(V, kEF);
    const double scale = std::max(1.0, std::abs(T));
    worst = std::min(worst, T / scale);
    if (T < -1e-12 * scale) ok = false;
    if (seed <= 5) {
      const double ref = oracle::kinetic_mu_quadrature(g, oracle::to_vector(V), kEF);
      const double rel = std::abs(T - ref) / std::abs(ref);
      max_rel = std::max(max_rel, rel);
      if (!(rel <= 1e-8)) ok = false;
    }
  }
  const double secs = t.seconds();
  report("A3", ok && secs < 60.0,
         fmt("min T/scale %.2e over 50 seeds (tol -1e-12), max rel err vs mu-quadrature %.2e on 5 (tol 1e-8), "
             "%.1f s (limit 60 s)",
             worst, max_rel, secs));
}

// A4
double manufactured_error(double m, double h) {
  const GridSpec g(30.0, static_cast<int>(std::lround(60.0 / h)) + 1);
  std::vector<double> rho(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) {
    const double z = g.node(i);
    const double e = std::exp(-z * z);
    rho[static_cast<std::size_t>(i)] = 0.5 * ((2.0 - 4.0 * z * z) * e + m * m * e);
  }
  const auto V = yukawa_solve(DensityProfile(g, rho), m);
  double err = 0.0;
  for (int i = 0; i < g.size(); ++i) err = std::max(err, std::abs(V[i] - std::exp(-g.node(i) * g.node(i))));
  return err;
}

void yukawa_order() {
  const Stopwatch t;
  const double r1 = manufactured_error(1.0, 0.1) / manufactured_error(1.0, 0.05);
  const double r4 = manufactured_error(4.0, 0.1) / manufactured_error(4.0, 0.05);
  const double secs = t.seconds();
  const auto in = [](double r) { return r >= 3.5 && r <= 4.5; };
  report("A4", in(r1) && in(r4) && secs < 5.0,
         fmt("error ratio h=0.1->0.05: m=1 %.3f, m=4 %.3f (band [3.5, 4.5]), %.2f s (limit 5 s)", r1, r4, secs));
}

// A5
void self_consistency(std::vector<double>& asym) {
  const Stopwatch t;
  const GridSpec g(60.0, 2001);
  const PhysicalParams p(kEF, 4.0);
  const auto nu = trench(g);
  const auto r = scf_solve(nu, p);
  const double res = sup_diff(scf_map(r.V_final, nu, p), r.V_final);

  ScfConfig from_first;
  from_first.initial_potential = scf_map(PotentialProfile::zeros(g), nu, p);
  const auto a = scf_solve(nu, p, from_first);
  const auto bumps = oracle::random_smooth_potential(g, 5, 0.5);
  std::vector<double> even(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) even[static_cast<std::size_t>(i)] = 0.5 * (bumps[i] + bumps[g.size() - 1 - i]);
  ScfConfig from_random;
  from_random.initial_potential = PotentialProfile(g, even);
  const auto b = scf_solve(nu, p, from_random);
  const double dV = std::max(sup_diff(a.V_final, r.V_final), sup_diff(b.V_final, r.V_final));
  const double secs = t.seconds();
  report("A5", r.converged && res <= 1e-8 && r.iterations <= 200 && dV <= 1e-7 && secs < 120.0,
         fmt("residual %.2e (tol 1e-8), %d iterations (limit 200), max|dV| from two other starts %.2e (tol 1e-7), "
             "%.1f s (limit 120 s)",
             res, r.iterations, dV, secs));
  for (const auto* s : {&r, &a, &b}) {
    asym.push_back(s->V_final.mirror_asymmetry());
    asym.push_back(s->rho_Q.mirror_asymmetry());
  }

  // An odd component in the start decays with the iteration but is only removed down to the SCF tolerance.
  ScfConfig from_bumps;
  from_bumps.initial_potential = bumps;
  const auto c = scf_solve(nu, p, from_bumps);
  info(fmt("non-even start: max|dV| %.2e, V asymmetry %.2e (tolerance-limited, not part of A9)",
           sup_diff(c.V_final, r.V_final), c.V_final.mirror_asymmetry()));
}

// A6, A7
MSweepReport energy_sweep(std::vector<double>& asym) {
  const Stopwatch t;
  const GridSpec g(60.0, 2001);
  const auto rep = sweep_m(trench(g), kEF, {16.0, 4.0, 2.0, 1.0, 0.5});
  const double secs = t.seconds();
  const auto& e = rep.entries;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < e.size(); ++k) gap = std::min(gap, e[k + 1].I - e[k].I);
  const double tail = e[1].I - e[0].I;
  std::string Is;
  for (const auto& x : e) Is += fmt("I(%g)=%.6g ", x.m, x.I);
  report("A6", gap >= -1e-10 && tail >= 0.0 && secs < 600.0,
         fmt("%smin gap over m=4..0.5 %.3e (tol -1e-10), I(4)-I(16) %.3e (>= 0), %.1f s (limit 600 s)", Is.c_str(),
             gap, tail, secs));
  info(fmt("extrapolated I(m -> 0) = %.6g", rep.extrapolated_I0));

  bool decreasing = true;
  std::string qs;
  for (std::size_t k = 1; k < e.size(); ++k) {
    qs += fmt("|Q(%g)|=%.6g ", e[k].m, std::abs(e[k].charge));
    if (k > 1 && !(std::abs(e[k].charge) < std::abs(e[k - 1].charge))) decreasing = false;
  }
  report("A7", decreasing, qs + "(strictly decreasing along m = 4, 2, 1, 0.5)");
  for (const auto& x : e) {
    asym.push_back(x.result.V_final.mirror_asymmetry());
    asym.push_back(x.result.rho_Q.mirror_asymmetry());
  }
  return rep;
}

// A8
void friedel(const MSweepReport& sweep, std::vector<double>& asym) {
  const double rho0 = free_gas_density(kEF);
  const FriedelWindow window{8.0, 50.0};
  FriedelOptions opt;
  opt.free_exponent = true;
  opt.defect_half_width = kW;

  bool ok = true;
  double fit_secs = 0.0;
  std::string line;
  for (double m : {4.0, 2.0}) {
    const auto state = box_averaged_state(trench, PhysicalParams(kEF, m), 720.0);
    asym.push_back(state.rho_Q.mirror_asymmetry());
    for (const auto* s : {&state.inner, &state.outer}) {
      asym.push_back(s->V_final.mirror_asymmetry());
      asym.push_back(s->rho_Q.mirror_asymmetry());
    }
    const Stopwatch t;
    const auto fit = friedel_fit(state.total_density(rho0), rho0, window, opt);
    fit_secs += t.seconds();
    const double p = fit.decay_exponent.value_or(std::nan(""));
    const bool eps_ok = std::abs(fit.eps - 2.0) <= 0.15 * 2.0;
    const bool p_ok = p >= 2.5 && p <= 3.5;
    ok = ok && eps_ok && p_ok && state.inner.converged && state.outer.converged && !fit.degenerate;
    line += fmt("m=%g: eps %.4f, p %.3f, a %.3e; ", m, fit.eps, p, fit.a);
  }
  report("A8", ok && fit_secs < 5.0,
         line + fmt("(eps within 15%% of 2.0, p in [2.5, 3.5], fits %.2f s limit 5 s; box-averaged L~720)", fit_secs));

  for (const auto& e : sweep.entries) {
    if (e.m != 4.0 && e.m != 2.0) continue;
    const auto fit = friedel_fit(e.result.rho_Q + e.result.nu + DensityProfile(e.result.nu.grid(),
                                     std::vector<double>(static_cast<std::size_t>(e.result.nu.size()), rho0)),
                                 rho0, window, opt);
    info(fmt("single box L=60, m=%g: eps %.4f, p %.3f", e.m, fit.eps, fit.decay_exponent.value_or(std::nan(""))));
  }
}

// A9
void symmetry(const std::vector<double>& asym) {
  double worst = 0.0;
  for (double a : asym) worst = std::max(worst, a);
  report("A9", worst <= 1e-9, fmt("max mirror asymmetry %.2e over %zu profiles (tol 1e-9)", worst, asym.size()));
}

// A10
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism() {
  const auto root = fs::temp_directory_path() / "fermi_slab_acceptance";
  fs::remove_all(root);
  bool ran = true;
  for (const char* d : {"a", "b"}) {
    const std::string cmd = std::string(FERMI_SLAB_BIN) + " solve --quiet --out " + (root / d).string();
    ran = ran && std::system(cmd.c_str()) == 0;
  }
  const bool csv = ran && slurp(root / "a" / "density.csv") == slurp(root / "b" / "density.csv");
  const bool json = ran && slurp(root / "a" / "summary.json") == slurp(root / "b" / "summary.json");
  const auto bytes = ran ? fs::file_size(root / "a" / "density.csv") : 0;
  report("A10", ran && csv && json,
         fmt("density.csv identical: %s (%ju bytes), summary.json identical: %s", csv ? "yes" : "no",
             static_cast<std::uintmax_t>(bytes), json ? "yes" : "no"));
}

}  // namespace

int main() {
  log::set_quiet(true);
  const Stopwatch total;
  std::vector<double> asym;
  free_gas_plateau();
  oracle_equivalence();
  kinetic_positivity();
  yukawa_order();
  self_consistency(asym);
  const auto sweep = energy_sweep(asym);
  friedel(sweep, asym);
  symmetry(asym);
  determinism();
  std::printf("%d of 10 criteria failed (%.0f s)\n", failures, total.seconds());
  return failures == 0 ? 0 : 1;
}
