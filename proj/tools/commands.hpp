#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace syncstab::cli {

struct CommonOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  int threads = 0;
};

int cmd_equilibria(const CommonOptions& common);

int cmd_geometry(const CommonOptions& common);

struct MapOptions {
  std::vector<std::string> ktilde;  // values in A*H, optional unit suffix
  int order = 5;
  int nP = 0;  // 0: default grid
  int nQ = 0;
};

int cmd_stability_map(const CommonOptions& common, const MapOptions& options);

struct SimOptions {
  std::string from = "zr";  // zr | zl
  double perturb = 0.01;    // relative, per component
  double t_end = 20.0;
  double dt = 1e-4;
  int stride = 10;
  int order = 5;
};

int cmd_simulate(const CommonOptions& common, const SimOptions& options);

}  // namespace syncstab::cli
