#include "CLI11.hpp"

#include "fxts/case_study.hpp"
#include "fxts/cert.hpp"
#include "fxts/clf.hpp"
#include "fxts/experiment.hpp"
#include "fxts/report.hpp"
#include "fxts/sim.hpp"
#include "fxts/sweep.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace {

using namespace fxts;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

// every key a config file may carry, across all subcommands
const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model", "x0", "mu",   "pu",        "p1",   "q1",  "T",  "umax", "umax-list", "T-list",
      "dt",    "t-end", "k", "out",       "mode", "tag", "no-control",
      "alpha1", "alpha2", "delta1", "v0", "rm-list"};
  return keys;
}

std::map<std::string, std::string> load_validated_config(const std::string& path) {
  auto keys = parse_config_file(path);
  for (const auto& [key, value] : keys) {
    (void)value;
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  return keys;
}

// option spec shared by the experiment subcommands: string-typed flags whose
// names mirror the config keys; explicit flags override file values
struct KeyedOptions {
  std::map<std::string, std::string> values;
  std::string config_path;
  bool no_control = false;
  bool no_control_set = false;

  void attach(CLI::App* cmd, const std::vector<std::string>& names, bool with_no_control) {
    cmd->add_option("--config", config_path, "key = value config file");
    for (const std::string& name : names) {
      auto handle = [this, name](const std::string& v) { values[name] = v; };
      cmd->add_option_function<std::string>("--" + name, handle);
    }
    if (with_no_control) {
      cmd->add_flag_callback("--no-control", [this] {
        no_control = true;
        no_control_set = true;
      }, "integrate the open loop (u = 0)");
    }
  }

  // file keys first, explicit flags on top
  std::map<std::string, std::string> merged(const std::set<std::string>& wanted) const {
    std::map<std::string, std::string> out;
    if (!config_path.empty()) {
      for (const auto& [key, value] : load_validated_config(config_path)) {
        if (wanted.count(key)) out[key] = value;
      }
    }
    for (const auto& [key, value] : values) out[key] = value;
    return out;
  }
};

const std::vector<std::string> kExperimentFlags = {
    "model", "x0", "mu", "pu", "p1", "q1", "T", "umax", "umax-list",
    "T-list", "dt", "t-end", "k", "out", "mode", "tag"};

ExperimentConfig build_experiment(const KeyedOptions& opts) {
  ExperimentConfig config;
  std::set<std::string> wanted(kExperimentFlags.begin(), kExperimentFlags.end());
  wanted.insert("no-control");
  apply_config(config, opts.merged(wanted));
  if (opts.no_control_set) config.no_control = opts.no_control;
  config.finalize();
  if (config.x0.size() != 2) throw ConfigError("the case-study model needs a 2-dimensional x0");
  if (config.p_u.size() != 1) throw ConfigError("the case-study model has one input; pu must be scalar");
  return config;
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

sweep::SweepProblem sweep_problem(const ExperimentConfig& config) {
  return sweep::SweepProblem{case_study_model(), case_study_goal(), to_vector(config.x0),
                             config.mu,          to_vector(config.p_u), config.p1,
                             config.q1,          config.dt,         config.t_end};
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string default_tag(const ExperimentConfig& config) {
  if (!config.tag.empty()) return config.tag;
  if (config.no_control) return "open_loop";
  return "umax" + report::format_number(config.u_max) + "_T" + report::format_number(config.t_budget);
}

const char* regime_name(cert::RegimeTag tag) {
  switch (tag) {
    case cert::RegimeTag::NonPositive: return "non-positive";
    case cert::RegimeTag::Subcritical: return "subcritical";
    default: return "supercritical";
  }
}

int run_cert(const KeyedOptions& opts) {
  std::set<std::string> wanted = {"alpha1", "alpha2", "delta1", "mu", "k", "v0"};
  auto keys = opts.merged(wanted);
  auto get = [&keys](const std::string& key, double fallback) {
    auto it = keys.find(key);
    if (it == keys.end()) return fallback;
    return parse_number_list(it->second).at(0);
  };
  double k = get("k", 0.99);
  if (!(k > 0.0 && k < 1.0)) throw ConfigError("k must be in (0,1)");

  FxtsGains gains = [&] {
    try {
      return FxtsGains(get("alpha1", 1.0), get("alpha2", 1.0), get("delta1", 0.0), get("mu", 2.0));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();

  cert::Regime regime = cert::classify_regime(gains);
  cert::CriticalLevels lv = cert::critical_levels(gains);
  std::cout << "regime: " << regime_name(regime.tag) << " (r = " << report::format_number(regime.r)
            << ")\n";
  std::cout << "delta_star = " << report::format_number(lv.delta_star)
            << ", v_star = " << report::format_number(lv.v_star) << "\n";
  if (lv.v1) {
    std::cout << "v1 = " << report::format_number(*lv.v1) << ", v2 = " << report::format_number(*lv.v2)
              << "\n";
  }
  double level = cert::domain_level(gains, gains.r >= 1.0 ? k : 1.0);
  if (std::isinf(level)) {
    std::cout << "domain: global (r < 1)\n";
  } else {
    std::cout << "domain level: V <= " << report::format_number(level) << " (k = "
              << report::format_number(k) << ")\n";
  }
  std::cout << "settling bound: T <= " << report::format_number(cert::settling_time_bound(gains, k))
            << "\n";

  if (keys.count("v0")) {
    double v0 = parse_number_list(keys.at("v0")).at(0);
    if (!(v0 >= 0.0)) throw ConfigError("v0 must be nonnegative");
    try {
      double oracle = cert::integral_oracle(gains, v0);
      double bound = cert::integral_bound(gains, v0, k);
      std::cout << "oracle I(v0 = " << report::format_number(v0)
                << ") = " << report::format_number(oracle)
                << ", bound = " << report::format_number(bound)
                << (oracle <= bound * (1.0 + 1e-9) ? " (oracle <= bound)" : " (BOUND VIOLATED)")
                << "\n";
    } catch (const std::domain_error& e) {
      std::cout << "oracle unavailable for v0 = " << report::format_number(v0) << ": " << e.what()
                << "\n";
    }
  }
  return kExitOk;
}

int run_simulate(const KeyedOptions& opts) {
  ExperimentConfig config = build_experiment(opts);
  ensure_out_dir(config.out_dir);

  SystemModel model = case_study_model();
  GoalSpec goal = case_study_goal();
  sim::SimOptions options;
  options.dt = config.dt;
  options.t_end = config.t_end > 0.0 ? config.t_end : 10.0 * config.t_budget;

  sim::Trajectory traj;
  if (config.no_control) {
    traj = sim::simulate_open_loop(model, goal, to_vector(config.x0), options);
  } else {
    clf::ClfQpConfig controller = clf::ClfQpConfig::from_time_budget(
        config.mu, config.t_budget, to_vector(config.p_u), config.p1, config.q1,
        InputConstraintSet::box(1, config.u_max));
    traj = sim::simulate(model, goal, controller, to_vector(config.x0), options);
  }

  std::string path = config.out_dir + "/trajectory_" + default_tag(config) + ".csv";
  report::write_file(path, report::trajectory_csv(traj));
  std::cout << "wrote " << path << " (" << traj.size() << " rows)\n";

  if (traj.diverged) {
    std::cout << "run diverged (|x| exceeded " << report::format_number(options.divergence_norm)
              << ")\n";
    return kExitDiverged;
  }
  if (traj.goal_entry_time) {
    std::cout << "goal entry at t = " << report::format_number(*traj.goal_entry_time) << "\n";
  } else {
    std::cout << "goal not reached by t_end = " << report::format_number(options.t_end) << "\n";
  }
  std::cout << "max |u| = " << report::format_number(traj.input_norm_max) << "\n";
  if (!config.no_control) {
    std::cout << "max delta1 = " << report::format_number(traj.max_delta1()) << "\n";
    clf::ClfQpConfig controller = clf::ClfQpConfig::from_time_budget(
        config.mu, config.t_budget, to_vector(config.p_u), config.p1, config.q1,
        InputConstraintSet::box(1, config.u_max));
    clf::ClosedLoopClassification cls =
        clf::classify_closed_loop(traj.delta1_values, controller.gains, config.k);
    const char* kind = cls.kind == clf::ClosedLoopCase::GlobalBudget     ? "global (budget holds)"
                       : cls.kind == clf::ClosedLoopCase::GlobalInflated ? "global (inflated bound)"
                                                                         : "local";
    std::cout << "closed-loop class: " << kind << ", r_M = " << report::format_number(cls.r_M)
              << ", T bound = " << report::format_number(cls.t_bound) << "\n";
  }
  return kExitOk;
}

int run_sweep_cmd(const KeyedOptions& opts, bool sweep_umax) {
  ExperimentConfig config = build_experiment(opts);
  ensure_out_dir(config.out_dir);

  std::vector<sweep::SweepPoint> points;
  if (sweep_umax) {
    for (double u : config.umax_list) points.push_back({u, config.t_budget});
  } else {
    for (double t : config.t_list) points.push_back({config.u_max, t});
  }

  auto records = sweep::run(sweep_problem(config), points, config.execution_mode());

  const std::string key = sweep_umax ? "u_max" : "T";
  const std::string base = sweep_umax ? "sweep_umax" : "sweep_T";
  report::write_file(config.out_dir + "/" + base + ".csv",
                     report::sweep_csv(key, records, sweep_umax));

  report::Series series;
  for (const auto& rec : records) {
    series.x.push_back(sweep_umax ? rec.point.u_max : rec.point.t_budget);
    series.y.push_back(rec.max_delta1);
  }
  report::write_file(config.out_dir + "/" + base + ".svg",
                     report::line_chart_svg(series, key, "max delta1",
                                            "max delta1 vs " + key));

  int diverged = 0;
  for (const auto& rec : records) diverged += rec.diverged ? 1 : 0;
  std::cout << "wrote " << config.out_dir << "/" << base << ".csv and .svg (" << records.size()
            << " runs, " << diverged << " diverged)\n";
  if (diverged == static_cast<int>(records.size())) return kExitDiverged;
  return kExitOk;
}

int run_doa_figure(const KeyedOptions& opts) {
  std::set<std::string> wanted = {"rm-list", "mu", "out"};
  auto keys = opts.merged(wanted);
  std::vector<double> rm_list = {1.0, 1.1, 1.5, 2.0, 3.0, 5.0};
  if (keys.count("rm-list")) rm_list = parse_number_list(keys.at("rm-list"));
  double mu = keys.count("mu") ? parse_number_list(keys.at("mu")).at(0) : 2.0;
  std::string out_dir = keys.count("out") ? keys.at("out") : "out";

  std::vector<double> radii;
  std::vector<std::string> labels;
  for (double rm : rm_list) {
    double level = [&] {
      try {
        return cert::doa_level(rm, mu);
      } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
      }
    }();
    radii.push_back(std::sqrt(level));
    labels.push_back("r_M = " + report::format_number(rm));
  }
  ensure_out_dir(out_dir);
  std::string path = out_dir + "/doa_figure.svg";
  report::write_file(path, report::circles_svg(radii, labels, "domain of attraction boundaries"));
  std::cout << "wrote " << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-time stability certificates and QP control synthesis"};
  app.require_subcommand(1);

  KeyedOptions cert_opts, sim_opts, umax_opts, t_opts, doa_opts;

  CLI::App* cert_cmd = app.add_subcommand("cert", "evaluate the certificate for given gains");
  cert_opts.attach(cert_cmd, {"alpha1", "alpha2", "delta1", "mu", "k", "v0"}, false);

  CLI::App* sim_cmd = app.add_subcommand("simulate", "one closed-loop (or open-loop) run");
  sim_opts.attach(sim_cmd, kExperimentFlags, true);

  CLI::App* umax_cmd = app.add_subcommand("sweep-umax", "sweep the input bound at fixed T");
  umax_opts.attach(umax_cmd, kExperimentFlags, false);

  CLI::App* t_cmd = app.add_subcommand("sweep-T", "sweep the time budget at fixed u_max");
  t_opts.attach(t_cmd, kExperimentFlags, false);

  CLI::App* doa_cmd = app.add_subcommand("doa-figure", "domain boundaries for a list of r_M");
  doa_opts.attach(doa_cmd, {"rm-list", "mu", "out"}, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cert_cmd->parsed()) return run_cert(cert_opts);
    if (sim_cmd->parsed()) return run_simulate(sim_opts);
    if (umax_cmd->parsed()) return run_sweep_cmd(umax_opts, true);
    if (t_cmd->parsed()) return run_sweep_cmd(t_opts, false);
    if (doa_cmd->parsed()) return run_doa_figure(doa_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
