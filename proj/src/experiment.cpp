#include "fxts/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fxts {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': " + text);
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("bad boolean value for '" + key + "': " + text);
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  // comma list "a,b,c" or range "lo:hi:count"
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::istringstream is(text);
    std::string lo_s, hi_s, n_s;
    if (!std::getline(is, lo_s, ':') || !std::getline(is, hi_s, ':') || !std::getline(is, n_s)) {
      throw ConfigError("bad range '" + text + "' (want lo:hi:count)");
    }
    double lo = parse_double("range", trim(lo_s));
    double hi = parse_double("range", trim(hi_s));
    int n = static_cast<int>(parse_double("range", trim(n_s)));
    if (n <= 0) throw ConfigError("range count must be positive in '" + text + "'");
    return sweep::linspace(lo, hi, n);
  }
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in list '" + text + "'");
    out.push_back(parse_double("list", item));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

void ExperimentConfig::finalize() {
  if (umax_list.empty()) umax_list = sweep::linspace(16.0, 25.0, 10);
  if (t_list.empty()) t_list = sweep::linspace(1.0, 10.0, 10);
  if (model != "case-study") throw ConfigError("unknown model '" + model + "'");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(mu > 1.0)) throw ConfigError("mu must be > 1");
  if (!(k > 0.0 && k < 1.0)) throw ConfigError("k must be in (0,1)");
  if (!(t_budget > 0.0)) throw ConfigError("T must be > 0");
  if (!(u_max > 0.0)) throw ConfigError("umax must be > 0");
  if (!(p1 > 0.0) || !(q1 > 0.0)) throw ConfigError("p1 and q1 must be > 0");
  for (double w : p_u) {
    if (!(w > 0.0)) throw ConfigError("pu weights must be > 0");
  }
  if (mode != "serial" && mode != "parallel") {
    throw ConfigError("mode must be 'serial' or 'parallel' (got '" + mode + "')");
  }
  for (double v : umax_list) {
    if (!(v > 0.0)) throw ConfigError("umax values must be > 0");
  }
  for (double v : t_list) {
    if (!(v > 0.0)) throw ConfigError("T values must be > 0");
  }
}

sweep::ExecutionMode ExperimentConfig::execution_mode() const {
  return mode == "serial" ? sweep::ExecutionMode::Serial : sweep::ExecutionMode::Parallel;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> keys;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        throw ConfigError("malformed section header at line " + std::to_string(lineno));
      }
      continue;  // sections only organize the file
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key = value at line " + std::to_string(lineno) + ": " + s);
    }
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
    keys[key] = value;  // duplicate keys: last one wins
  }
  return keys;
}

void apply_config(ExperimentConfig& config, const std::map<std::string, std::string>& keys) {
  for (const auto& [key, value] : keys) {
    if (key == "model") {
      config.model = value;
    } else if (key == "x0") {
      config.x0 = parse_number_list(value);
    } else if (key == "mu") {
      config.mu = parse_double(key, value);
    } else if (key == "pu") {
      config.p_u = parse_number_list(value);
    } else if (key == "p1") {
      config.p1 = parse_double(key, value);
    } else if (key == "q1") {
      config.q1 = parse_double(key, value);
    } else if (key == "T") {
      config.t_budget = parse_double(key, value);
    } else if (key == "umax") {
      config.u_max = parse_double(key, value);
    } else if (key == "umax-list") {
      config.umax_list = parse_number_list(value);
    } else if (key == "T-list") {
      config.t_list = parse_number_list(value);
    } else if (key == "dt") {
      config.dt = parse_double(key, value);
    } else if (key == "t-end") {
      config.t_end = parse_double(key, value);
    } else if (key == "k") {
      config.k = parse_double(key, value);
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "mode") {
      config.mode = value;
    } else if (key == "tag") {
      config.tag = value;
    } else if (key == "no-control") {
      config.no_control = parse_bool(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

}  // namespace fxts
