#pragma once

// Desired configuration (circle radii, vertex coordinates, neighbor
// placement), well-posedness bound on beta1, cost-nonnegativity sampling
// and the convex-hull containment predicate.

#include <cmath>
#include <numbers>
#include <vector>

#include "encircle/errors.hpp"
#include "encircle/potential.hpp"
#include "encircle/rng.hpp"
#include "encircle/topology.hpp"

namespace encircle {

inline constexpr double kPi = std::numbers::pi;

// Printed closed forms, implemented verbatim for comparison reporting.
// The m-odd row disagrees with the force balance (see solve_radius_active
// and table1_discrepancy_factor); rows for even m match the solver.
inline double table1_radius_active(int m, double alpha1, double alpha2) {
  if (m < 3) throw UnsupportedSize("table1_radius_active: m must be >= 3");
  if (m % 2 == 1) {
    const double th = (m - 1) * kPi / m;
    return std::cbrt(alpha2 * (1.0 - std::cos(th)) / (4.0 * alpha1 * std::sin(th / 2.0)));
  }
  if ((m / 2) % 2 == 1) {
    const double c = std::cos(kPi / m);
    return std::cbrt(alpha2 * (1.0 + c * c * c + std::cos(2.0 * kPi / m)) /
                     (4.0 * alpha1 * c * c * c));
  }
  double s = 0.25;
  for (int l = m / 4; l < m / 2; ++l)
    s += (1.0 - std::cos(2.0 * kPi * l / m)) / (4.0 * std::pow(std::sin(kPi * l / m), 3));
  return std::cbrt(alpha2 / alpha1 * s);
}

inline double table1_radius_passive(int n, double beta1, double beta2) {
  if (n < 3) throw UnsupportedSize("table1_radius_passive: n must be >= 3");
  return std::pow(
      beta1 / (4.0 * beta2 * std::sin(kPi / n) * (1.0 - std::cos(2.0 * kPi / n))), 0.25);
}

// Radial force balance on the uniform circle of radius r:
// g(r) = alpha1 r - alpha2 sum_offsets (1 - cos(2 pi o/m)) / (8 r^2 sin^3(pi o/m)).
inline double radial_balance_active(int m, double r, double alpha1, double alpha2) {
  double rep = 0.0;
  for (int o : farthest_offsets(m))
    rep += (1.0 - std::cos(2.0 * kPi * o / m)) /
           (8.0 * r * r * std::pow(std::sin(kPi * o / m), 3));
  return alpha1 * r - alpha2 * rep;
}

// Ground truth for the active radius: bisection on the monotone balance.
inline double solve_radius_active(int m, const Topology& topo, double alpha1, double alpha2) {
  if (m < 3) throw UnsupportedSize("solve_radius_active: m must be >= 3");
  if (topo.m != m || topo.active_degree() != static_cast<int>(farthest_offsets(m).size()))
    throw SizeMismatch("solve_radius_active: topology does not match m");
  const double unit = std::cbrt(alpha2 / alpha1);
  double lo = 1e-6 * unit, hi = 1e6 * unit;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (radial_balance_active(m, mid, alpha1, alpha2) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Ratio (table1 / solver)^3 for m odd: sin^2((m-1) pi / (2m)) — the printed
// row is consistent with a sin-for-sin^3 typo in its denominator.
inline double table1_discrepancy_factor(int m) {
  if (m % 2 == 0) return 1.0;
  const double s = std::sin((m - 1) * kPi / (2.0 * m));
  return s * s;
}

struct DesiredConfiguration {
  int m = 0, n = 0;
  double r_active = 0.0, r_passive = 0.0;
  SystemState state;  // x*, centered at the origin
  Topology topology;

  std::vector<double> coords() const { return flatten(state); }
};

inline DesiredConfiguration desired_configuration(int m, int n, const GameParams& p) {
  if (m < 3 || n < 3) throw UnsupportedSize("desired_configuration: m, n must be >= 3");
  p.validate();
  DesiredConfiguration d;
  d.m = m;
  d.n = n;
  const Topology built = combined_topology(m, n);
  d.r_active = solve_radius_active(m, built, p.alpha1, p.alpha2);
  d.r_passive = table1_radius_passive(n, p.beta1, p.beta2);
  d.state.active.resize(m);
  d.state.passive.resize(n);
  for (int i = 0; i < m; ++i)
    d.state.active[i] = {d.r_active * std::cos(2.0 * kPi * i / m),
                         d.r_active * std::sin(2.0 * kPi * i / m)};
  for (int j = 0; j < n; ++j)
    d.state.passive[j] = {d.r_passive * std::cos(2.0 * kPi * j / n),
                          d.r_passive * std::sin(2.0 * kPi * j / n)};
  d.topology = derive_topology_from_pattern(d.state.active, d.state.passive);
  return d;
}

// beta12* = alpha1 (min_j ||x_j^p - x_c^a||)^3; beta1 below this keeps the
// centroid gap decaying.
inline double beta12_star(const SystemState& s, double alpha1) {
  const Vec2 ca = centroid(s.active);
  double dmin = std::numeric_limits<double>::infinity();
  for (const Vec2& xp : s.passive) dmin = std::min(dmin, (xp - ca).norm());
  if (dmin < kEpsMin) throw SingularState("beta12_star: passive agent at the active centroid");
  return alpha1 * dmin * dmin * dmin;
}

struct CostReport {
  double min_q_active = 0.0;
  double min_q_passive = 0.0;
  bool all_nonneg = false;
};

// Evaluates q on the given state plus `samples` uniform per-coordinate
// perturbations of relative amplitude rel_amplitude (relative to the
// largest coordinate magnitude); reports minima over agents and samples.
inline CostReport check_cost_nonnegativity(const SystemState& base, const Topology& t,
                                           const GameParams& p, int samples, std::uint64_t seed,
                                           double rel_amplitude = 0.1) {
  const int m = base.m(), n = base.n();
  std::vector<double> x0 = flatten(base);
  double scale = 0.0;
  for (double v : x0) scale = std::max(scale, std::abs(v));

  CostReport rep;
  rep.min_q_active = std::numeric_limits<double>::infinity();
  rep.min_q_passive = std::numeric_limits<double>::infinity();
  CounterRng rng(seed);
  for (int s = 0; s <= samples; ++s) {
    std::vector<double> x = x0;
    if (s > 0)
      for (double& v : x) v += rng.uniform(-rel_amplitude, rel_amplitude) * scale;
    SystemState st = unflatten(x, m, n);
    try {
      check_nonsingular(st, t);
    } catch (const SingularState&) {
      continue;
    }
    for (int i = 0; i < m; ++i)
      rep.min_q_active = std::min(rep.min_q_active, cost_integrand(Group::Active, i, st, t, p));
    for (int j = 0; j < n; ++j)
      rep.min_q_passive = std::min(rep.min_q_passive, cost_integrand(Group::Passive, j, st, t, p));
  }
  rep.all_nonneg = rep.min_q_active >= 0.0 && rep.min_q_passive >= 0.0;
  return rep;
}

struct ContainmentFlags {
  bool passive_in_active_hull = false;
  bool active_in_passive_hull = false;
};

inline ContainmentFlags containment_check(double r_active, double r_passive, int m, int n) {
  ContainmentFlags f;
  f.passive_in_active_hull = r_passive <= r_active * std::cos(kPi / m);
  f.active_in_passive_hull = r_active <= r_passive * std::cos(kPi / n);
  return f;
}

inline double pattern_distance(const SystemState& s, const DesiredConfiguration& d) {
  return pattern_distance_groups(s.active, s.passive, d.state.active, d.state.passive);
}

}  // namespace encircle
