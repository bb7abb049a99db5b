#include <CLI11.hpp>

#include "fermi_slab/commands.hpp"
#include "fermi_slab/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reduced Hartree-Fock solver for planar defects in the free-electron gas"};
  app.set_version_flag("--version", std::string(fslab::kToolName) + " " + fslab::kToolVersion);
  app.require_subcommand(1);

  fslab::CommandOptions opts;
  std::string config, out, input;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Run configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory (overrides output.directory)");
    sub->add_option("--override", opts.overrides, "section.key=value, applied after the config file")
        ->take_all()
        ->allow_extra_args(false);
    sub->add_flag("--quiet", opts.quiet, "Suppress progress output and warnings");
  };

  std::string command;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "Solve the self-consistent equations; writes density.csv and summary.json"},
      {"sweep-m", "Solve along analysis.m_sweep; writes msweep.csv and summary.json"},
      {"fit-friedel", "Fit Friedel oscillations to a density.csv; writes friedel.json"},
      {"free-gas", "Free-gas density in the box; writes free_gas.csv and free_gas.json"},
      {"validate", "Run the oracle and manufactured-solution checks"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (name == "fit-friedel") {
      sub->add_option("--input", input, "density.csv to fit (default: <out>/density.csv)");
    }
    sub->callback([&command, n = name] { command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fslab::kExitConfig;
  }
  if (!config.empty()) opts.config_path = config;
  if (!out.empty()) opts.out_dir = out;
  if (!input.empty()) opts.input = input;
  return fslab::run_command(command, opts);
}
