#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "syncstab/errors.hpp"
#include "syncstab/version.hpp"

namespace {

// Exit codes: 0 success, 2 infeasible model, 3 numeric failure, 4 bad config.
constexpr int kExitInfeasible = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitBadConfig = 4;

bool parse_grid(const std::string& text, int& nP, int& nQ) {
  const auto x = text.find('x');
  if (x == std::string::npos) return false;
  try {
    nP = std::stoi(text.substr(0, x));
    nQ = std::stoi(text.substr(x + 1));
  } catch (const std::exception&) {
    return false;
  }
  return nP > 1 && nQ > 1;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace syncstab;
  using namespace syncstab::cli;

  CLI::App app{"grid-connected synchronverter analysis toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommonOptions common;
  std::string grid_text;
  MapOptions map_options;
  SimOptions sim_options;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "model config (JSON)")
        ->required();
    sub->add_option("--out", common.out_dir, "output directory")
        ->default_str(".");
    sub->add_option("--threads", common.threads,
                    "worker threads (0 = hardware concurrency)");
  };

  CLI::App* eq = app.add_subcommand(
      "equilibria", "enumerate equilibrium points with stability verdicts");
  add_common(eq);

  CLI::App* geo = app.add_subcommand(
      "geometry", "power-plane circle construction and branch samples");
  add_common(geo);

  CLI::App* map = app.add_subcommand(
      "stability-map", "classify a grid of (P_set, Q_set) setpoints");
  add_common(map);
  map->add_option("--ktilde", map_options.ktilde,
                  "reactive-loop gain values in A*H (k/M suffix allowed)")
      ->delimiter(',');
  map->add_option("--order", map_options.order, "model order (4 or 5)")
      ->check(CLI::IsMember({4, 5}));
  map->add_option("--grid", grid_text, "resolution <nP>x<nQ> (default 201x201)");

  CLI::App* sim = app.add_subcommand(
      "simulate", "time-domain run of the saturated model");
  add_common(sim);
  sim->add_option("--order", sim_options.order, "model order (4 or 5)")
      ->check(CLI::IsMember({4, 5}));
  sim->add_option("--from", sim_options.from,
                  "start near this equilibrium (zr | zl)")
      ->check(CLI::IsMember({"zr", "zl"}));
  sim->add_option("--perturb", sim_options.perturb,
                  "relative perturbation per component");
  sim->add_option("--tend", sim_options.t_end, "duration (s)");
  sim->add_option("--dt", sim_options.dt, "fixed step (s)");
  sim->add_option("--stride", sim_options.stride, "steps per recorded sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadConfig;
  }

  try {
    if (*eq) return cmd_equilibria(common);
    if (*geo) return cmd_geometry(common);
    if (*map) {
      if (!grid_text.empty() &&
          !parse_grid(grid_text, map_options.nP, map_options.nQ)) {
        std::fprintf(stderr, "error: --grid expects <nP>x<nQ>\n");
        return kExitBadConfig;
      }
      return cmd_stability_map(common, map_options);
    }
    if (*sim) return cmd_simulate(common, sim_options);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadConfig;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return 0;
}
