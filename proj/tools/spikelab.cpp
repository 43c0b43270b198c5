// spikelab <command> <config>: runs one stage of the two-spike construction
// and appends its tables to the output directory.

#include "spikelab/commands.hpp"
#include "spikelab/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for two-spike standing waves of a coupled cubic Schrodinger system"};
  app.require_subcommand(1);
  std::string config_path;
  const std::vector<std::pair<std::string, std::string>> help{
      {"groundstate", "scalar ground states, nondegeneracy and decay fits; writes profile checkpoints"},
      {"corrections", "Phi_eps, Psi_eps and Z_eps over the eps ladder"},
      {"errornorms", "term-by-term ansatz error norms and scaling exponents"},
      {"coercivity", "smallest singular value of the projected linearization"},
      {"reduced", "constants b and c, model roots, c0 root in d and the coupled solve"},
      {"asymptotics", "overlap-integral regimes and decay fits"},
      {"full-solve", "coupled Newton solve at the model eps"}};
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("config", config_path, "YAML or JSON run configuration")->required();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help exits 0; usage errors share the config-error code.
    return app.exit(e) == 0 ? 0 : spikelab::kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  spikelab::RunConfig config;
  try {
    config = spikelab::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "spikelab " << name << ": " << e.what() << '\n';
    return spikelab::exit_code_for(e);
  }
  return spikelab::run_command(name, config, std::cerr);
}
