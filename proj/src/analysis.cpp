#include "fermi_slab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "fermi_slab/log.hpp"

namespace fslab {
namespace {

constexpr double kPi = std::numbers::pi;

struct WindowData {
  std::vector<double> z;
  std::vector<double> y;  // rho - rho0
};

struct LinearFit {
  double c_cos = 0.0;
  double c_sin = 0.0;
  double sse = 0.0;
};

// Least squares of y ~ (c_cos cos(2 eps z) + c_sin sin(2 eps z)) / z^3.
LinearFit solve_linear(const WindowData& d, double eps) {
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
  const std::size_t n = d.z.size();
  std::vector<double> u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = d.z[i];
    const double w = 1.0 / (z * z * z);
    u[i] = std::cos(2.0 * eps * z) * w;
    v[i] = std::sin(2.0 * eps * z) * w;
    s11 += u[i] * u[i];
    s12 += u[i] * v[i];
    s22 += v[i] * v[i];
    b1 += u[i] * d.y[i];
    b2 += v[i] * d.y[i];
  }
  LinearFit fit;
  const double det = s11 * s22 - s12 * s12;
  if (!(std::abs(det) > 0.0)) return fit;
  fit.c_cos = (s22 * b1 - s12 * b2) / det;
  fit.c_sin = (s11 * b2 - s12 * b1) / det;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = d.y[i] - fit.c_cos * u[i] - fit.c_sin * v[i];
    fit.sse += r * r;
  }
  return fit;
}

double golden_section(const WindowData& d, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = solve_linear(d, x1).sse;
  double f2 = solve_linear(d, x2).sse;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = solve_linear(d, x1).sse;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = solve_linear(d, x2).sse;
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// Complex demodulation at frequency 2 eps, boxcar over one period, then
// log-log regression of the envelope.
std::optional<double> envelope_exponent(const WindowData& d, double eps, double h) {
  const double period = kPi / eps;
  const int half = static_cast<int>(std::lround(period / (2.0 * h)));
  const int n = static_cast<int>(d.z.size());
  if (half < 1 || n < 2 * half + 3) return std::nullopt;
  std::vector<std::complex<double>> c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    c[static_cast<std::size_t>(i)] = d.y[static_cast<std::size_t>(i)] * std::polar(1.0, -2.0 * eps * d.z[static_cast<std::size_t>(i)]);
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (int i = half; i < n - half; ++i) {
    std::complex<double> acc = 0.0;
    for (int k = i - half; k <= i + half; ++k) acc += c[static_cast<std::size_t>(k)];
    const double env = 2.0 * std::abs(acc) / (2 * half + 1);
    if (!(env > 0.0)) continue;
    const double x = std::log(d.z[static_cast<std::size_t>(i)]);
    const double yv = std::log(env);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    ++count;
  }
  if (count < 3) return std::nullopt;
  const double denom = count * sxx - sx * sx;
  if (!(denom > 0.0)) return std::nullopt;
  return -(count * sxy - sx * sy) / denom;
}

double simpson(const SampledProfile& f) {
  const int n = f.size();
  const double h = f.grid().spacing();
  double s = f[0] + f[n - 1];
  for (int i = 1; i < n - 1; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

}  // namespace

FriedelFit friedel_fit(const DensityProfile& total_density, double rho0, const FriedelWindow& window,
                       const FriedelOptions& options) {
  const GridSpec& grid = total_density.grid();
  const double L = grid.half_length();
  if (!(window.z_lo > 0.0 && window.z_hi > window.z_lo)) {
    throw InvalidArgument("friedel window must satisfy 0 < z_lo < z_hi");
  }
  if (!(window.z_hi < L - 5.0)) {
    std::ostringstream msg;
    msg << "friedel window upper end " << window.z_hi << " must be below L - 5 = " << L - 5.0;
    throw InvalidArgument(msg.str());
  }
  if (options.defect_half_width && !(window.z_lo > *options.defect_half_width + 2.0)) {
    std::ostringstream msg;
    msg << "friedel window lower end " << window.z_lo << " must exceed defect edge + 2 = "
        << *options.defect_half_width + 2.0;
    throw InvalidArgument(msg.str());
  }
  if (!(rho0 > 0.0) && !options.eps_range) {
    throw InvalidArgument("friedel_fit needs rho0 > 0 (or an explicit eps range) to set the frequency scale");
  }
  const double kF = rho0 > 0.0 ? std::cbrt(6.0 * kPi * kPi * rho0) : 0.0;
  const auto [eps_lo, eps_hi] = options.eps_range.value_or(std::pair{0.5 * kF, 1.5 * kF});
  if (!(eps_lo > 0.0 && eps_hi > eps_lo)) throw InvalidArgument("friedel eps range must satisfy 0 < lo < hi");

  const double width = window.z_hi - window.z_lo;
  if (width < 3.0 * kPi / eps_hi) {
    std::ostringstream msg;
    msg << "friedel window of length " << width << " holds fewer than 3 oscillation periods (need >= "
        << 3.0 * kPi / eps_hi << ")";
    throw InvalidArgument(msg.str());
  }

  WindowData d;
  for (int i = 0; i < grid.size(); ++i) {
    const double z = grid.node(i);
    if (z >= window.z_lo && z <= window.z_hi) {
      d.z.push_back(z);
      d.y.push_back(total_density[i] - rho0);
    }
  }
  if (d.z.size() < 10) {
    throw InvalidArgument("friedel window holds " + std::to_string(d.z.size()) + " samples; at least 10 are needed");
  }

  const double step = kPi / (16.0 * width);
  const int n_scan = static_cast<int>(std::ceil((eps_hi - eps_lo) / step));
  double best_eps = eps_lo;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n_scan; ++k) {
    const double eps = std::min(eps_hi, eps_lo + k * step);
    const double sse = solve_linear(d, eps).sse;
    if (sse < best_sse) {
      best_sse = sse;
      best_eps = eps;
    }
  }
  const double eps = golden_section(d, std::max(eps_lo, best_eps - step), std::min(eps_hi, best_eps + step));
  const LinearFit lin = solve_linear(d, eps);

  FriedelFit fit;
  fit.eps = eps;
  fit.eps_over_kF = kF > 0.0 ? eps / kF : 0.0;
  fit.a = std::hypot(lin.c_cos, lin.c_sin);
  fit.delta = std::atan2(-lin.c_sin, lin.c_cos);
  if (fit.delta <= -kPi) fit.delta += 2.0 * kPi;
  fit.window = window;
  fit.samples = static_cast<int>(d.z.size());
  fit.rms_residual = std::sqrt(lin.sse / static_cast<double>(d.z.size()));

  double peak = 0.0;
  for (double v : d.y) peak = std::max(peak, std::abs(v));
  const double amplitude_at_edge = fit.a / std::pow(window.z_lo, 3);
  const double floor = 1e-13 * std::max(rho0, peak);
  fit.degenerate = !(amplitude_at_edge > floor) || !(peak > 0.0);
  if (fit.degenerate) log::warn("friedel fit is degenerate: oscillation amplitude is below the noise floor");

  if (options.free_exponent && !fit.degenerate) {
    fit.decay_exponent = envelope_exponent(d, eps, grid.spacing());
  }
  return fit;
}

double extrapolate_to_zero_m(const std::vector<double>& ms, const std::vector<double>& Is) {
  if (ms.size() != Is.size() || ms.empty()) throw InvalidArgument("extrapolation needs matching, non-empty lists");
  const std::size_t k = std::min<std::size_t>(3, ms.size());
  const std::size_t first = ms.size() - k;
  double sum = 0.0;
  for (std::size_t i = first; i < ms.size(); ++i) {
    double weight = 1.0;
    const double xi = ms[i] * ms[i];
    for (std::size_t j = first; j < ms.size(); ++j) {
      if (j == i) continue;
      const double xj = ms[j] * ms[j];
      weight *= (0.0 - xj) / (xi - xj);
    }
    sum += weight * Is[i];
  }
  return sum;
}

MSweepReport sweep_m(const DensityProfile& nu, double epsilon_F, const std::vector<double>& m_list,
                     const ScfConfig& cfg) {
  if (m_list.empty()) throw InvalidArgument("m sweep list is empty");
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    if (!(m_list[i] > 0.0)) throw InvalidArgument("m sweep values must be > 0");
    if (i > 0 && !(m_list[i] < m_list[i - 1])) throw InvalidArgument("m sweep values must be strictly decreasing");
  }

  MSweepReport report;
  ScfConfig step_cfg = cfg;
  for (double m : m_list) {
    try {
      ScfResult r = scf_solve(nu, PhysicalParams(epsilon_F, m), step_cfg);
      step_cfg.initial_potential = r.V_final;
      const double I = r.energy.total;
      const double charge = r.total_defect_charge;
      const int iterations = r.iterations;
      report.entries.push_back({m, I, charge, iterations, std::move(r)});
    } catch (const NonConvergence& e) {
      std::ostringstream msg;
      msg << "m sweep aborted at m = " << m << ": " << e.what();
      throw SweepAborted(msg.str(), e.residual_history(), std::move(report), m);
    }
  }

  std::vector<double> ms, Is;
  for (const auto& e : report.entries) {
    ms.push_back(e.m);
    Is.push_back(e.I);
  }
  report.extrapolated_I0 = extrapolate_to_zero_m(ms, Is);
  report.monotonicity_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < report.entries.size(); ++i) {
    report.monotonicity_margin = std::min(report.monotonicity_margin, Is[i] - Is[i - 1]);
    if (!(std::abs(report.entries[i].charge) < std::abs(report.entries[i - 1].charge))) {
      report.charge_strictly_decreasing = false;
    }
  }
  report.monotone = report.monotonicity_margin >= -1e-10;
  return report;
}

GridSpec antiphase_grid(double epsilon_F, double approx_L) {
  if (!(epsilon_F > 0.0)) throw InvalidArgument("antiphase_grid needs epsilon_F > 0");
  const double h = std::sqrt((1.0 - std::cos(kPi / 16.0)) / epsilon_F);
  const long nodes = std::lround(approx_L / h);
  if (nodes < 1) throw InvalidArgument("antiphase_grid: approx_L is smaller than the spacing");
  return GridSpec(static_cast<double>(nodes) * h, static_cast<int>(2 * nodes + 1));
}

DensityProfile BoxAveragedState::total_density(double rho0) const {
  std::vector<double> v(static_cast<std::size_t>(nu.size()));
  for (int i = 0; i < nu.size(); ++i) v[static_cast<std::size_t>(i)] = rho0 + nu[i] + rho_Q[i];
  return DensityProfile(nu.grid(), std::move(v));
}

BoxAveragedState box_averaged_state(const std::function<DensityProfile(const GridSpec&)>& make_defect,
                                    const PhysicalParams& params, double approx_L, const ScfConfig& cfg) {
  constexpr int kShift = 8;
  const GridSpec inner = antiphase_grid(params.epsilon_F(), approx_L);
  const double h = inner.spacing();
  const int half_nodes = (inner.size() - 1) / 2 + kShift;
  const GridSpec outer(static_cast<double>(half_nodes) * h, 2 * half_nodes + 1);

  DensityProfile nu = make_defect(inner);
  ScfResult a = scf_solve(nu, params, cfg);
  ScfResult b = scf_solve(make_defect(outer), params, cfg);
  std::vector<double> avg(static_cast<std::size_t>(inner.size()));
  for (int i = 0; i < inner.size(); ++i) avg[static_cast<std::size_t>(i)] = 0.5 * (a.rho_Q[i] + b.rho_Q[i + kShift]);
  return {std::move(nu), DensityProfile(inner, std::move(avg)), std::move(a), std::move(b)};
}

NeutralityReport neutrality_report(const ScfResult& result) { return neutrality_report(result.rho_Q, result.nu); }

NeutralityReport neutrality_report(const DensityProfile& rho_Q, const DensityProfile& nu) {
  const DensityProfile charge = rho_Q - nu;
  const double trap = integrate(charge);
  return {trap, std::abs(trap - simpson(charge))};
}

}  // namespace fslab
