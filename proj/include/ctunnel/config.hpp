#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctunnel/gap.hpp"
#include "ctunnel/potential.hpp"

namespace ctunnel {

struct PotentialBlock {
  std::string kind = "quartic";  // quartic | figure | custom
  std::string expr;
  double x_well = 1.0;
  std::optional<double> vpp;
  std::optional<double> v_inf;
  double seal_eta = 0.0;
  double seal_amplitude = 0.0;
};

struct WkbBlock {
  int n_max = 1;
  int J = 3;
  bool dump = false;
};

struct OutputBlock {
  std::string directory = "ctunnel_out";
  std::vector<std::string> plot_formats{"svg"};
};

struct RunConfig {
  std::string name;
  PotentialBlock potential;
  std::vector<double> alphas;
  std::vector<double> h_grid;  ///< sorted descending
  SolverOptions solver;
  double resolution_factor = 50.0;
  /// (X, n_points) rungs for the per-alpha convergence check.
  std::vector<std::pair<double, int>> ladder{{3.0, 401}, {3.5, 801}, {4.0, 1601}};
  WkbBlock wkb;
  OutputBlock outputs;
  std::string source;  ///< raw text the config was parsed from
};

/// TOML text to a checked RunConfig. Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

PotentialSpec make_potential(const RunConfig& cfg);
GapOptions gap_options(const RunConfig& cfg);

}  // namespace ctunnel
