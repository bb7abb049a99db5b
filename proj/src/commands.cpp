#include "fermi_slab/commands.hpp"

#include <cmath>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "fermi_slab/analysis.hpp"
#include "fermi_slab/fermi.hpp"
#include "fermi_slab/io.hpp"
#include "fermi_slab/log.hpp"
#include "fermi_slab/scf.hpp"
#include "fermi_slab/spectral.hpp"
#include "fermi_slab/validation.hpp"

namespace fslab {
namespace {

using Json = nlohmann::ordered_json;

class ValidationFailed : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation_failed"; }
};

std::filesystem::path output_dir(const CommandOptions& opts, const RunConfig& cfg) {
  return opts.out_dir ? *opts.out_dir : cfg.output.directory;
}

Json config_echo(const RunConfig& cfg) {
  Json j = Json::object();
  std::istringstream in(canonical_config(cfg));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

Json header(const std::string& command, const RunConfig& cfg) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config_hash"] = config_hash(cfg);
  j["config"] = config_echo(cfg);
  return j;
}

CsvMetadata csv_meta(const std::string& command, const RunConfig& cfg, const GridSpec& grid) {
  return {{"tool", std::string(kToolName) + " " + kToolVersion},
          {"command", command},
          {"config_hash", config_hash(cfg)},
          {"grid.L", format_double(grid.half_length())},
          {"grid.n", std::to_string(grid.size())},
          {"grid.h", format_double(grid.spacing())},
          {"physics.epsilon_F", format_double(cfg.physics.epsilon_F)},
          {"physics.m", format_double(cfg.physics.m)}};
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2)); }

Json energy_json(const EnergyBreakdown& e) {
  Json j;
  j["t_ren"] = e.t_ren;
  j["interaction"] = e.interaction;
  j["total"] = e.total;
  return j;
}

Json result_json(const ScfResult& r) {
  Json j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["final_residual"] = r.residual_history.empty() ? 0.0 : r.residual_history.back();
  j["residual_history"] = r.residual_history;
  j["energy"] = energy_json(r.energy);
  const auto neutral = neutrality_report(r);
  j["total_defect_charge"] = r.total_defect_charge;
  j["charge_quadrature_error"] = neutral.error_estimate;
  j["V_sup_norm"] = r.V_final.sup_norm();
  j["mirror_asymmetry"] = {{"V", r.V_final.mirror_asymmetry()}, {"rho_Q", r.rho_Q.mirror_asymmetry()}};
  return j;
}

void say(const CommandOptions& opts, const std::string& msg) {
  if (!opts.quiet) std::cout << msg << '\n';
}

}  // namespace

RunConfig resolve_config(const CommandOptions& opts) {
  if (opts.config_path) return load_config(*opts.config_path, opts.overrides);
  return parse_config("", "<defaults>", opts.overrides);
}

DensityProfile build_defect(const RunConfig& cfg, const GridSpec& grid) {
  if (cfg.defect.type == DefectType::File) return read_defect_csv(cfg.defect.file, grid);
  const double rho0 = free_gas_density(cfg.physics.epsilon_F);
  return trench_defect(grid, cfg.defect.depth_scale * rho0, cfg.defect.w, cfg.defect.mollify_s);
}

int cmd_solve(const CommandOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  const auto out = output_dir(opts, cfg);
  const GridSpec grid = cfg.grid_spec();
  const PhysicalParams params = cfg.physical_params();
  const DensityProfile nu = build_defect(cfg, grid);

  std::optional<ScfResult> result;
  std::string failure;
  try {
    result = scf_solve(nu, params, cfg.scf_config());
  } catch (const ScfNonConvergence& e) {
    result = e.partial();
    failure = e.what();
  }
  const ScfResult& r = *result;

  if (cfg.output.csv) {
    DensityColumns cols;
    cols.z = grid.nodes();
    cols.nu.assign(nu.values().begin(), nu.values().end());
    cols.rho_Q.assign(r.rho_Q.values().begin(), r.rho_Q.values().end());
    cols.V.assign(r.V_final.values().begin(), r.V_final.values().end());
    cols.rho_total.resize(cols.z.size());
    for (std::size_t i = 0; i < cols.z.size(); ++i) cols.rho_total[i] = params.rho0() + cols.nu[i] + cols.rho_Q[i];
    write_density_csv(out / "density.csv", csv_meta("solve", cfg, grid), cols);
  }
  if (cfg.output.json) {
    Json j = header("solve", cfg);
    j["rho0"] = params.rho0();
    j["k_F"] = fermi_wavenumber(params.epsilon_F());
    const Json body = result_json(r);
    for (const auto& [k, v] : body.items()) j[k] = v;
    write_json(out / "summary.json", j);
  }
  if (!r.converged) throw NonConvergence(failure, r.residual_history);
  std::ostringstream msg;
  msg << "converged in " << r.iterations << " iterations; I = " << format_double(r.energy.total)
      << ", charge = " << format_double(r.total_defect_charge);
  say(opts, msg.str());
  return kExitOk;
}

int cmd_sweep_m(const CommandOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  const auto out = output_dir(opts, cfg);
  const GridSpec grid = cfg.grid_spec();
  const DensityProfile nu = build_defect(cfg, grid);

  MSweepReport report;
  std::optional<SweepAborted> aborted;
  try {
    report = sweep_m(nu, cfg.physics.epsilon_F, cfg.analysis.m_sweep, cfg.scf_config());
  } catch (const SweepAborted& e) {
    report = e.partial();
    aborted.emplace(e);
  }

  if (cfg.output.csv) {
    std::vector<MSweepRow> rows;
    for (const auto& e : report.entries) rows.push_back({e.m, e.I, e.charge, e.iterations});
    write_msweep_csv(out / "msweep.csv", csv_meta("sweep-m", cfg, grid), rows);
  }
  if (cfg.output.json) {
    Json j = header("sweep-m", cfg);
    j["converged"] = !aborted.has_value();
    if (aborted) j["failed_m"] = aborted->failed_m();
    Json entries = Json::array();
    for (const auto& e : report.entries) {
      Json row;
      row["m"] = e.m;
      row["I"] = e.I;
      row["energy"] = energy_json(e.result.energy);
      row["charge"] = e.charge;
      row["iterations"] = e.iterations;
      row["final_residual"] = e.result.residual_history.back();
      row["mirror_asymmetry"] = std::max(e.result.V_final.mirror_asymmetry(), e.result.rho_Q.mirror_asymmetry());
      entries.push_back(row);
    }
    j["entries"] = entries;
    if (!aborted) {
      j["extrapolated_I0"] = report.extrapolated_I0;
      j["monotonicity_margin"] = report.entries.size() > 1 ? Json(report.monotonicity_margin) : Json(nullptr);
      j["monotone"] = report.monotone;
      j["charge_strictly_decreasing"] = report.charge_strictly_decreasing;
    }
    write_json(out / "summary.json", j);
  }
  if (aborted) throw NonConvergence(aborted->what(), aborted->residual_history());
  for (const auto& e : report.entries) {
    say(opts, "m = " + format_double(e.m) + ": I = " + format_double(e.I) + ", charge = " + format_double(e.charge) +
                  ", iterations = " + std::to_string(e.iterations));
  }
  say(opts, "extrapolated I0 = " + format_double(report.extrapolated_I0) +
                (report.monotone ? "" : "  (WARNING: I is not monotone in m)"));
  return kExitOk;
}

int cmd_fit_friedel(const CommandOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  const auto out = output_dir(opts, cfg);
  const GridSpec grid = cfg.grid_spec();
  const auto input = opts.input ? *opts.input : out / "density.csv";
  const DensityTable table = read_density_csv(input);

  auto check_meta = [&](const std::string& key, double expected) {
    const auto it = table.meta.find(key);
    if (it == table.meta.end()) {
      throw ConfigError(input.string() + " lacks '" + key + "' metadata", input.string(), key);
    }
    const double got = parse_double(it->second);
    if (std::abs(got - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
      throw ConfigError(input.string() + " was written with " + key + " = " + it->second +
                            ", inconsistent with the configured " + format_double(expected),
                        input.string(), key);
    }
  };
  check_meta("grid.L", grid.half_length());
  check_meta("grid.n", grid.size());
  check_meta("physics.epsilon_F", cfg.physics.epsilon_F);
  if (static_cast<int>(table.cols.z.size()) != grid.size()) {
    throw ConfigError(input.string() + " has " + std::to_string(table.cols.z.size()) + " rows, grid.n = " +
                          std::to_string(grid.size()),
                      input.string(), "grid.n");
  }

  const DensityProfile total(grid, table.cols.rho_total);
  const double rho0 = free_gas_density(cfg.physics.epsilon_F);
  FriedelOptions fopts;
  fopts.free_exponent = cfg.analysis.free_exponent;
  if (cfg.defect.type == DefectType::Trench) fopts.defect_half_width = cfg.defect.w;
  const FriedelFit fit = friedel_fit(total, rho0, cfg.friedel_window(), fopts);

  Json j = header("fit-friedel", cfg);
  const auto hash = table.meta.find("config_hash");
  j["input"] = input.filename().string();
  j["input_config_hash"] = hash == table.meta.end() ? Json(nullptr) : Json(hash->second);
  j["a"] = fit.a;
  j["delta"] = fit.delta;
  j["eps"] = fit.eps;
  j["eps_over_kF"] = fit.eps_over_kF;
  j["window"] = {fit.window.z_lo, fit.window.z_hi};
  j["rms_residual"] = fit.rms_residual;
  j["samples"] = fit.samples;
  j["degenerate"] = fit.degenerate;
  j["decay_exponent"] = fit.decay_exponent ? Json(*fit.decay_exponent) : Json(nullptr);
  write_json(out / "friedel.json", j);
  say(opts, "eps = " + format_double(fit.eps) + " (eps/k_F = " + format_double(fit.eps_over_kF) +
                "), a = " + format_double(fit.a) + ", delta = " + format_double(fit.delta) +
                (fit.decay_exponent ? ", p = " + format_double(*fit.decay_exponent) : std::string()));
  return kExitOk;
}

int cmd_free_gas(const CommandOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  const auto out = output_dir(opts, cfg);
  const GridSpec grid = cfg.grid_spec();
  const double eF = cfg.physics.epsilon_F;
  const FreeReference free = make_free_reference(grid, eF);
  const double rho0 = free_gas_density(eF);
  double plateau = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    if (std::abs(grid.node(i)) <= 5.0) plateau = std::max(plateau, std::abs(free.density[i] - rho0) / rho0);
  }
  if (cfg.output.csv) {
    std::string text;
    for (const auto& [k, v] : csv_meta("free-gas", cfg, grid)) text += "# " + k + " = " + v + "\n";
    text += "z,rho\n";
    for (int i = 0; i < grid.size(); ++i) {
      text += format_double(grid.node(i)) + "," + format_double(free.density[i]) + "\n";
    }
    write_text_file(out / "free_gas.csv", text);
  }
  if (cfg.output.json) {
    Json j = header("free-gas", cfg);
    j["rho0"] = rho0;
    j["k_F"] = fermi_wavenumber(eF);
    j["box_density_center"] = free.density[grid.center()];
    j["plateau_max_relative_deviation"] = plateau;
    j["occupied_box_states"] = free.eigenvalues.size();
    write_json(out / "free_gas.json", j);
  }
  say(opts, "rho0 = " + format_double(rho0) + ", box density at z = 0: " +
                format_double(free.density[grid.center()]));
  return kExitOk;
}

int cmd_validate(const CommandOptions& opts) {
  std::optional<std::filesystem::path> out = opts.out_dir;
  if (opts.config_path || !opts.overrides.empty()) out = output_dir(opts, resolve_config(opts));
  const ValidationReport report = run_validation_suite();
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    say(opts, std::string(c.passed ? "PASS " : "FAIL ") + c.name + ": " + format_double(c.value) + " (tolerance " +
                  format_double(c.tolerance) + ")");
    Json row;
    row["name"] = c.name;
    row["passed"] = c.passed;
    row["value"] = c.value;
    row["tolerance"] = c.tolerance;
    if (!c.detail.empty()) row["detail"] = c.detail;
    checks.push_back(row);
  }
  if (out) {
    Json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = "validate";
    j["passed"] = report.all_passed();
    j["checks"] = checks;
    write_json(*out / "validation.json", j);
  }
  if (!report.all_passed()) throw ValidationFailed("one or more validation checks failed");
  return kExitOk;
}

int run_command(const std::string& name, const CommandOptions& opts) {
  log::set_quiet(opts.quiet);
  auto report = [&](const Error& e, int code) {
    Json j;
    j["error"]["kind"] = e.kind();
    j["error"]["message"] = e.what();
    j["error"]["exit_code"] = code;
    if (auto* c = dynamic_cast<const ConfigError*>(&e)) {
      j["error"]["location"] = c->location();
      if (!c->key().empty()) j["error"]["key"] = c->key();
    }
    if (auto* n = dynamic_cast<const NeutralityError*>(&e)) j["error"]["total_charge"] = n->total_charge();
    if (auto* n = dynamic_cast<const NonConvergence*>(&e)) j["error"]["residual_history"] = n->residual_history();
    const std::string text = j.dump(2);
    std::cerr << text << '\n';
    if (opts.out_dir) {
      try {
        write_text_file(*opts.out_dir / "error.json", text);
      } catch (const Error&) {
      }
    }
    return code;
  };
  try {
    if (name == "solve") return cmd_solve(opts);
    if (name == "sweep-m") return cmd_sweep_m(opts);
    if (name == "fit-friedel") return cmd_fit_friedel(opts);
    if (name == "free-gas") return cmd_free_gas(opts);
    if (name == "validate") return cmd_validate(opts);
    throw InvalidArgument("unknown command '" + name + "'");
  } catch (const ConfigError& e) {
    return report(e, kExitConfig);
  } catch (const NonConvergence& e) {
    return report(e, kExitNonConvergence);
  } catch (const ValidationFailed& e) {
    return report(e, kExitValidation);
  } catch (const Error& e) {
    return report(e, kExitOther);
  } catch (const std::exception& e) {
    return report(Error(e.what()), kExitOther);
  }
}

}  // namespace fslab
