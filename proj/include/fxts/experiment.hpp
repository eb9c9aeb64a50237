#pragma once

#include "fxts/core.hpp"
#include "fxts/sweep.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fxts {

// Raised for malformed config files, unknown keys and bad values; the CLI
// maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment settings shared by the CLI subcommands. Defaults follow the
// benchmark study: mu = 2, unit input weights, p1 = 100, q1 = 1000,
// x0 = (3.33, 1.33), u_max swept over [16, 25] and the budget over [1, 10].
struct ExperimentConfig {
  std::string model = "case-study";
  std::vector<double> x0{3.33, 1.33};
  double mu = 2.0;
  std::vector<double> p_u{1.0};
  double p1 = 100.0;
  double q1 = 1000.0;
  double t_budget = 1.0;              // fixed budget for sweep-umax / simulate
  double u_max = 16.0;                // fixed bound for sweep-T / simulate
  std::vector<double> umax_list;      // default: 10 points over [16, 25]
  std::vector<double> t_list;         // default: 10 points over [1, 10]
  double dt = 1e-3;
  double t_end = 0.0;                 // <= 0: ten budgets
  double k = 0.99;
  std::string out_dir = "out";
  std::string mode = "parallel";      // serial | parallel
  std::string tag;
  bool no_control = false;

  void finalize();  // fills list defaults, validates ranges
  sweep::ExecutionMode execution_mode() const;
};

// Flat key = value lines with optional [section] headers and # comments.
// Sections are cosmetic; keys are resolved flat and mirror the CLI flags.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Applies parsed keys onto the config; unknown keys raise ConfigError.
void apply_config(ExperimentConfig& config, const std::map<std::string, std::string>& keys);

std::vector<double> parse_number_list(const std::string& text);

}  // namespace fxts
