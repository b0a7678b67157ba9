// hybridtp: command-line driver.
//   hybridtp <command> [--config file.json] [--key value ...]
// Every config key is also a flag of the same name; flags override the file.

#include "hybridtp/cli_io.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace hybridtp;

namespace {

const char* describe(const std::string& key) {
  static const std::map<std::string, const char*> help = {
      {"alpha", "coherent amplitude"},
      {"zeta", "squeezing parameter, 0 < zeta < 1"},
      {"resource", "coherent | squeezed"},
      {"encoding", "fock | qubit"},
      {"phi", "input phase (radians, 0.25pi, pi/4)"},
      {"x", "coefficient of |alpha> (real)"},
      {"y", "coefficient of |-alpha> (real)"},
      {"thetaB", "phase on B"},
      {"thetaC", "phase on C"},
      {"thetaD", "phase on D"},
      {"cutoff", "Fock cutoff"},
      {"qMin", "grid lower q"},
      {"qMax", "grid upper q"},
      {"pMin", "grid lower p"},
      {"pMax", "grid upper p"},
      {"gridPoints", "grid points per axis"},
      {"points", "phase grid points over [0, 2pi] (0 = none)"},
      {"phis", "comma-separated phases"},
      {"thetaBs", "comma-separated thetaB values"},
      {"thetaCs", "comma-separated thetaC values"},
      {"coupling", "free | equal | offset (thetaC = thetaB - offset)"},
      {"offset", "thetaB - thetaC for coupling=offset"},
      {"c", "C outcome: 0, 1, +, -"},
      {"d", "D photon count: 0 or 1"},
      {"shots", "number of shots"},
      {"seed", "RNG seed (falls back to HYBRIDTP_SEED)"},
      {"output", "output path, - for stdout"},
      {"format", "json | csv"},
  };
  auto it = help.find(key);
  return it == help.end() ? "" : it->second;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controlled teleportation through a hybrid coherent / single-photon channel"};
  app.require_subcommand(1, 1);

  struct Sub {
    CLI::App* app;
    std::string config;
    std::map<std::string, std::string> values;
  };
  std::map<std::string, Sub> subs;
  for (const auto& name : command_names()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name);
    s.app->add_option("--config", s.config, "JSON config file");
    for (const auto& key : allowed_keys(name)) s.app->add_option("--" + key, s.values[key], describe(key));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      ojson flags = ojson::object();
      for (const auto& [key, value] : s.values)
        if (s.app->count("--" + key)) flags[key] = value;
      const ojson file = s.config.empty() ? ojson() : load_config_file(s.config);
      const RunConfig cfg = parse_config(name, merge_config(file, flags));
      write_artifact(run_command(cfg), cfg.output, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "hybridtp: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}
