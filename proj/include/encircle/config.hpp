#pragma once

// Flat key = value scenario files: one pair per line, '#' starts a comment.
// Keys: m, n, alpha1, alpha2, beta1, beta2, dt, t_final, seed, record_every,
// out_prefix, init.type (random_box | explicit), init.half_width,
// init.min_separation, init.coords (whitespace/comma-separated flat list).

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "encircle/errors.hpp"
#include "encircle/sim.hpp"

namespace encircle {

struct RunConfig {
  SimConfig sim;
  std::string out_prefix = "run";
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    if (kv.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    kv[key] = val;
  }
  return kv;
}

inline RunConfig parse_run_config(std::istream& in) {
  auto kv = parse_key_values(in);
  RunConfig rc;

  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("config: missing required key '" + key + "'");
    const std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_opt = [&](const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto to_double = [](const std::string& key, const std::string& v) {
    try {
      size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + key + "' is not a number: " + v);
    }
  };

  rc.sim.m = static_cast<int>(to_double("m", take("m")));
  rc.sim.n = static_cast<int>(to_double("n", take("n")));
  rc.sim.params.alpha1 = to_double("alpha1", take("alpha1"));
  rc.sim.params.alpha2 = to_double("alpha2", take("alpha2"));
  rc.sim.params.beta1 = to_double("beta1", take("beta1"));
  rc.sim.params.beta2 = to_double("beta2", take("beta2"));
  rc.sim.dt = to_double("dt", take_opt("dt", "1e-3"));
  rc.sim.t_final = to_double("t_final", take_opt("t_final", "20"));
  rc.sim.seed = static_cast<std::uint64_t>(to_double("seed", take_opt("seed", "1")));
  rc.sim.record_every =
      static_cast<int>(to_double("record_every", take_opt("record_every", "100")));
  rc.out_prefix = take_opt("out_prefix", "run");

  const std::string init_type = take_opt("init.type", "random_box");
  if (init_type == "random_box") {
    rc.sim.box.half_width = to_double("init.half_width", take_opt("init.half_width", "3"));
    rc.sim.box.min_separation =
        to_double("init.min_separation", take_opt("init.min_separation", "0.1"));
  } else if (init_type == "explicit") {
    std::string coords = take("init.coords");
    for (char& c : coords)
      if (c == ',') c = ' ';
    std::istringstream cs(coords);
    std::vector<double> flat;
    double v;
    while (cs >> v) flat.push_back(v);
    if (static_cast<int>(flat.size()) != 2 * (rc.sim.m + rc.sim.n))
      throw ConfigError("config: init.coords needs exactly 2(m+n) numbers");
    rc.sim.init_state = unflatten(flat, rc.sim.m, rc.sim.n);
  } else {
    throw ConfigError("config: init.type must be random_box or explicit");
  }

  if (!kv.empty()) throw ConfigError("config: unknown key '" + kv.begin()->first + "'");
  rc.sim.validate();
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open file " + path);
  return parse_run_config(f);
}

}  // namespace encircle
