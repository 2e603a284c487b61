#pragma once

// Closed-loop integration of the game dynamics under the Nash strategies
// (fixed-step RK4) with per-snapshot convergence diagnostics.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "encircle/equilibrium.hpp"
#include "encircle/potential.hpp"
#include "encircle/rng.hpp"
#include "encircle/topology.hpp"

namespace encircle {

struct RandomBoxInit {
  double half_width = 3.0;
  double min_separation = 0.1;
};

struct SimConfig {
  int m = 0, n = 0;
  GameParams params;
  double dt = 1e-3;
  double t_final = 20.0;
  std::uint64_t seed = 1;
  int record_every = 100;
  std::optional<SystemState> init_state;  // explicit start; otherwise random box
  RandomBoxInit box;

  void validate() const {
    params.validate();
    if (m < 3 || n < 3) throw ConfigError("SimConfig: m, n must be >= 3");
    if (!(dt > 0.0) || dt * params.alpha1 > 1e-1)
      throw ConfigError("SimConfig: dt must be positive and <= 0.1/alpha1");
    if (!(t_final > 0.0)) throw ConfigError("SimConfig: t_final must be positive");
    if (record_every < 1) throw ConfigError("SimConfig: record_every must be >= 1");
    if (!init_state && box.min_separation < 10.0 * kEpsMin)
      throw ConfigError("SimConfig: min_separation must be >= 10*eps_min");
    if (init_state &&
        (init_state->m() != m || init_state->n() != n))
      throw ConfigError("SimConfig: explicit init has wrong group sizes");
  }
};

struct DiagnosticRecord {
  double radius_error_active = 0.0;
  double radius_error_passive = 0.0;
  double spacing_error_active = 0.0;
  double spacing_error_passive = 0.0;
  double center_gap = 0.0;
  double max_control_norm = 0.0;
  double value_active = 0.0;
  double value_passive = 0.0;
  double pattern_distance = 0.0;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<SystemState> states;
  std::vector<DiagnosticRecord> diagnostics;
};

namespace detail {

inline void rhs(const SystemState& s, const Topology& t, const GameParams& p,
                std::vector<Vec2>& dot_active, std::vector<Vec2>& dot_passive) {
  const int m = s.m(), n = s.n();
  check_nonsingular(s, t);
  const Vec2 ca = centroid(s.active);
  const Vec2 cp = centroid(s.passive);
  for (int i = 0; i < m; ++i) {
    Vec2 u = p.alpha1 * (cp - s.active[i]);
    for (int k : t.active_nbrs[i]) {
      const Vec2 d = s.active[i] - s.active[k];
      u += p.alpha2 / std::pow(d.norm(), 3) * d;
    }
    dot_active[i] = u;
  }
  for (int j = 0; j < n; ++j) {
    const Vec2 d = s.passive[j] - ca;
    Vec2 u = p.beta1 / std::pow(d.norm(), 3) * d;
    for (int k : t.passive_nbrs[j]) {
      const Vec2 e = s.passive[k] - s.passive[j];
      u += p.beta2 * e.norm() * e;
    }
    dot_passive[j] = u;
  }
}

inline SystemState advance(const SystemState& s, const std::vector<Vec2>& ka,
                           const std::vector<Vec2>& kp, double h) {
  SystemState out = s;
  for (int i = 0; i < s.m(); ++i) out.active[i] += h * ka[i];
  for (int j = 0; j < s.n(); ++j) out.passive[j] += h * kp[j];
  return out;
}

}  // namespace detail

inline SystemState rk4_step(const SystemState& s, const Topology& t, const GameParams& p,
                            double dt) {
  const int m = s.m(), n = s.n();
  std::vector<Vec2> k1a(m), k1p(n), k2a(m), k2p(n), k3a(m), k3p(n), k4a(m), k4p(n);
  detail::rhs(s, t, p, k1a, k1p);
  detail::rhs(detail::advance(s, k1a, k1p, dt / 2), t, p, k2a, k2p);
  detail::rhs(detail::advance(s, k2a, k2p, dt / 2), t, p, k3a, k3p);
  detail::rhs(detail::advance(s, k3a, k3p, dt), t, p, k4a, k4p);
  SystemState out = s;
  for (int i = 0; i < m; ++i)
    out.active[i] += (dt / 6.0) * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]);
  for (int j = 0; j < n; ++j)
    out.passive[j] += (dt / 6.0) * (k1p[j] + 2.0 * k2p[j] + 2.0 * k3p[j] + k4p[j]);
  return out;
}

inline DiagnosticRecord diagnostics(const SystemState& s, const Topology& t, const GameParams& p,
                                    const DesiredConfiguration& d) {
  DiagnosticRecord r;
  const Vec2 ca = centroid(s.active);
  const Vec2 cp = centroid(s.passive);

  auto group_errors = [](const std::vector<Vec2>& pts, Vec2 c, double radius, double& rad_err,
                         double& spc_err) {
    const int k = static_cast<int>(pts.size());
    rad_err = 0.0;
    std::vector<double> ang(k);
    for (int i = 0; i < k; ++i) {
      rad_err = std::max(rad_err, std::abs((pts[i] - c).norm() - radius));
      ang[i] = std::atan2(pts[i].y - c.y, pts[i].x - c.x);
    }
    std::sort(ang.begin(), ang.end());
    const double want = 2.0 * kPi / k;
    spc_err = 0.0;
    for (int i = 0; i < k; ++i) {
      const double gap = i + 1 < k ? ang[i + 1] - ang[i] : ang[0] + 2.0 * kPi - ang[k - 1];
      spc_err = std::max(spc_err, std::abs(gap - want));
    }
  };
  group_errors(s.active, ca, d.r_active, r.radius_error_active, r.spacing_error_active);
  group_errors(s.passive, cp, d.r_passive, r.radius_error_passive, r.spacing_error_passive);
  r.center_gap = (ca - cp).norm();
  for (int i = 0; i < s.m(); ++i)
    r.max_control_norm = std::max(r.max_control_norm, control_active(i, s, t, p).norm());
  for (int j = 0; j < s.n(); ++j)
    r.max_control_norm = std::max(r.max_control_norm, control_passive(j, s, t, p).norm());
  r.value_active = value_active(s, t, p);
  r.value_passive = value_passive(s, t, p);
  r.pattern_distance = pattern_distance(s, d);
  return r;
}

// Uniform positions in a centered square, rejection-sampled until all
// active pairs and every passive-to-active-centroid distance clear
// min_separation.
inline SystemState random_box_state(int m, int n, const RandomBoxInit& box, std::uint64_t seed) {
  CounterRng rng(seed);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    SystemState s;
    s.active.resize(m);
    s.passive.resize(n);
    for (int i = 0; i < m; ++i) {
      s.active[i].x = rng.uniform(-box.half_width, box.half_width);
      s.active[i].y = rng.uniform(-box.half_width, box.half_width);
    }
    for (int j = 0; j < n; ++j) {
      s.passive[j].x = rng.uniform(-box.half_width, box.half_width);
      s.passive[j].y = rng.uniform(-box.half_width, box.half_width);
    }
    bool ok = true;
    for (int i = 0; i < m && ok; ++i)
      for (int k = i + 1; k < m && ok; ++k)
        if ((s.active[i] - s.active[k]).norm() < box.min_separation) ok = false;
    const Vec2 ca = centroid(s.active);
    for (int j = 0; j < n && ok; ++j)
      if ((s.passive[j] - ca).norm() < box.min_separation) ok = false;
    if (ok) return s;
  }
  throw ConfigError("random_box_state: rejection sampling failed (box too tight?)");
}

inline TrajectoryRecord simulate(const SimConfig& cfg) {
  cfg.validate();
  // Use the desired configuration's (pattern-consistent) vertex labeling so
  // the equilibrium placement is stationary under the simulated graph; it is
  // isomorphic to the built topology for every supported size.
  const DesiredConfiguration des = desired_configuration(cfg.m, cfg.n, cfg.params);
  const Topology& topo = des.topology;
  SystemState s = cfg.init_state ? *cfg.init_state
                                 : random_box_state(cfg.m, cfg.n, cfg.box, cfg.seed);

  TrajectoryRecord rec;
  const long steps = std::lround(cfg.t_final / cfg.dt);
  auto record = [&](long step) {
    try {
      rec.times.push_back(step * cfg.dt);
      rec.states.push_back(s);
      rec.diagnostics.push_back(diagnostics(s, topo, cfg.params, des));
    } catch (const SingularState& e) {
      throw SingularState(e.what(), step * cfg.dt);
    }
  };
  record(0);
  for (long k = 0; k < steps; ++k) {
    try {
      s = rk4_step(s, topo, cfg.params, cfg.dt);
    } catch (const SingularState& e) {
      throw SingularState(e.what(), (k + 1) * cfg.dt);
    }
    if ((k + 1) % cfg.record_every == 0 || k + 1 == steps) record(k + 1);
  }
  return rec;
}

}  // namespace encircle
