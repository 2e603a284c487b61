#pragma once

// Analytic core of the game: value functions, gradient factorization
// C(x)x, Nash controllers, cost integrands q, HJB residuals and analytic
// Hessians. Coordinates are stacked active-first: agent t occupies flat
// indices 2t, 2t+1.

#include <cmath>
#include <vector>

#include "encircle/errors.hpp"
#include "encircle/geometry.hpp"
#include "encircle/linalg.hpp"
#include "encircle/topology.hpp"

namespace encircle {

inline constexpr double kEpsMin = 1e-6;  // singularity guard on 1/r terms

struct GameParams {
  double alpha1 = 1.0, alpha2 = 1.0, beta1 = 1.0, beta2 = 1.0;

  void validate() const {
    if (!(alpha1 > 0 && alpha2 > 0 && beta1 > 0 && beta2 > 0))
      throw ConfigError("GameParams: all gains must be strictly positive");
  }
};

struct SystemState {
  std::vector<Vec2> active;
  std::vector<Vec2> passive;

  int m() const { return static_cast<int>(active.size()); }
  int n() const { return static_cast<int>(passive.size()); }
};

enum class Group { Active, Passive };

inline Vec2 centroid(const std::vector<Vec2>& pts) {
  Vec2 c{0, 0};
  for (Vec2 p : pts) c += p;
  return c * (1.0 / static_cast<double>(pts.size()));
}

inline std::vector<double> flatten(const SystemState& s) {
  std::vector<double> x;
  x.reserve(2 * (s.m() + s.n()));
  for (Vec2 p : s.active) {
    x.push_back(p.x);
    x.push_back(p.y);
  }
  for (Vec2 p : s.passive) {
    x.push_back(p.x);
    x.push_back(p.y);
  }
  return x;
}

inline SystemState unflatten(const std::vector<double>& x, int m, int n) {
  SystemState s;
  s.active.resize(m);
  s.passive.resize(n);
  for (int i = 0; i < m; ++i) s.active[i] = {x[2 * i], x[2 * i + 1]};
  for (int j = 0; j < n; ++j) s.passive[j] = {x[2 * (m + j)], x[2 * (m + j) + 1]};
  return s;
}

// Guards only the distances that appear under 1/r: connected active pairs
// and passive-to-active-centroid.
inline void check_nonsingular(const SystemState& s, const Topology& t) {
  for (auto [i, k] : t.active_edges)
    if ((s.active[i] - s.active[k]).norm() < kEpsMin)
      throw SingularState("connected active agents closer than eps_min");
  const Vec2 ca = centroid(s.active);
  for (int j = 0; j < s.n(); ++j)
    if ((s.passive[j] - ca).norm() < kEpsMin)
      throw SingularState("passive agent at the active centroid");
}

// (alpha1/2n) sum_i sum_j ||x_i^a - x_j^p||^2
//   + (alpha2/2) sum_i sum_{k in N_i} 1/||x_i^a - x_k^a||
inline double value_active(const SystemState& s, const Topology& t, const GameParams& p) {
  check_nonsingular(s, t);
  const int m = s.m(), n = s.n();
  double s1 = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) s1 += (s.active[i] - s.passive[j]).norm2();
  double s2 = 0.0;
  for (int i = 0; i < m; ++i)
    for (int k : t.active_nbrs[i]) s2 += 1.0 / (s.active[i] - s.active[k]).norm();
  return p.alpha1 / (2.0 * n) * s1 + p.alpha2 / 2.0 * s2;
}

// beta1 sum_j 1/||x_j^p - x_c^a|| + (beta2/6) sum_j sum_{k in N_j} ||x_j^p - x_k^p||^3
inline double value_passive(const SystemState& s, const Topology& t, const GameParams& p) {
  check_nonsingular(s, t);
  const Vec2 ca = centroid(s.active);
  double s1 = 0.0;
  for (int j = 0; j < s.n(); ++j) s1 += 1.0 / (s.passive[j] - ca).norm();
  double s2 = 0.0;
  for (int j = 0; j < s.n(); ++j)
    for (int k : t.passive_nbrs[j]) s2 += std::pow((s.passive[j] - s.passive[k]).norm(), 3);
  return p.beta1 * s1 + p.beta2 / 6.0 * s2;
}

namespace detail {

inline void set_block(Matrix& c, int rb, int cb, double v) {
  c(2 * rb, 2 * cb) = v;
  c(2 * rb + 1, 2 * cb + 1) = v;
}

inline void add_block2(Matrix& h, int rb, int cb, const double b[2][2], double scale) {
  h(2 * rb, 2 * cb) += scale * b[0][0];
  h(2 * rb, 2 * cb + 1) += scale * b[0][1];
  h(2 * rb + 1, 2 * cb) += scale * b[1][0];
  h(2 * rb + 1, 2 * cb + 1) += scale * b[1][1];
}

// Hessian of 1/||u||: (3 u u^T - ||u||^2 I)/||u||^5
inline void hess_invr(Vec2 u, double out[2][2]) {
  const double r2 = u.norm2(), r5 = std::pow(std::sqrt(r2), 5);
  out[0][0] = (3 * u.x * u.x - r2) / r5;
  out[0][1] = 3 * u.x * u.y / r5;
  out[1][0] = out[0][1];
  out[1][1] = (3 * u.y * u.y - r2) / r5;
}

// Hessian of ||u||^3: 3(||u|| I + u u^T/||u||)
inline void hess_cube(Vec2 u, double out[2][2]) {
  const double r = u.norm();
  out[0][0] = 3 * (r + u.x * u.x / r);
  out[0][1] = 3 * u.x * u.y / r;
  out[1][0] = out[0][1];
  out[1][1] = 3 * (r + u.y * u.y / r);
}

}  // namespace detail

// C^a(x): gradient factor of the active value function, grad = C^a(x) x.
inline Matrix c_active(const SystemState& s, const Topology& t, const GameParams& p) {
  check_nonsingular(s, t);
  const int m = s.m(), n = s.n(), N = 2 * (m + n);
  Matrix c(N, N);
  for (int l = 0; l < m; ++l) {
    double rep = 0.0;
    for (int q : t.active_nbrs[l]) rep += 1.0 / std::pow((s.active[l] - s.active[q]).norm(), 3);
    detail::set_block(c, l, l, p.alpha1 - p.alpha2 * rep);
    for (int k : t.active_nbrs[l])
      detail::set_block(c, l, k, p.alpha2 / std::pow((s.active[l] - s.active[k]).norm(), 3));
    for (int j = 0; j < n; ++j) detail::set_block(c, l, m + j, -p.alpha1 / n);
  }
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < m; ++l) detail::set_block(c, m + j, l, -p.alpha1 / n);
    detail::set_block(c, m + j, m + j, static_cast<double>(m) / n * p.alpha1);
  }
  return c;
}

// C^p(x): gradient factor of the passive value function.
inline Matrix c_passive(const SystemState& s, const Topology& t, const GameParams& p) {
  check_nonsingular(s, t);
  const int m = s.m(), n = s.n(), N = 2 * (m + n);
  const Vec2 ca = centroid(s.active);
  Matrix c(N, N);
  double sum_inv3 = 0.0;
  std::vector<double> inv3(n);
  for (int j = 0; j < n; ++j) {
    inv3[j] = 1.0 / std::pow((s.passive[j] - ca).norm(), 3);
    sum_inv3 += inv3[j];
  }
  for (int l = 0; l < m; ++l) {
    for (int k = 0; k < m; ++k) detail::set_block(c, l, k, -p.beta1 / (m * m) * sum_inv3);
    for (int j = 0; j < n; ++j) detail::set_block(c, l, m + j, p.beta1 / m * inv3[j]);
  }
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < m; ++l) detail::set_block(c, m + j, l, p.beta1 / m * inv3[j]);
    double spacing = 0.0;
    for (int q : t.passive_nbrs[j]) spacing += (s.passive[j] - s.passive[q]).norm();
    detail::set_block(c, m + j, m + j, -p.beta1 * inv3[j] + p.beta2 * spacing);
    for (int k : t.passive_nbrs[j])
      detail::set_block(c, m + j, m + k, -p.beta2 * (s.passive[j] - s.passive[k]).norm());
  }
  return c;
}

struct GradientFactor {
  Matrix c_active;
  Matrix c_passive;
};

inline GradientFactor gradient_factor(const SystemState& s, const Topology& t,
                                      const GameParams& p) {
  return {c_active(s, t, p), c_passive(s, t, p)};
}

// u_i^a = alpha1 (x_c^p - x_i^a) + alpha2 sum_{k in N_i} (x_i - x_k)/||x_i - x_k||^3
inline Vec2 control_active(int i, const SystemState& s, const Topology& t, const GameParams& p) {
  check_nonsingular(s, t);
  const Vec2 cp = centroid(s.passive);
  Vec2 u = p.alpha1 * (cp - s.active[i]);
  for (int k : t.active_nbrs[i]) {
    const Vec2 d = s.active[i] - s.active[k];
    u += p.alpha2 / std::pow(d.norm(), 3) * d;
  }
  return u;
}

// u_j^p = beta1 (x_j^p - x_c^a)/||.||^3 + beta2 sum_{k in N_j} ||x_j - x_k|| (x_k - x_j)
inline Vec2 control_passive(int j, const SystemState& s, const Topology& t, const GameParams& p) {
  check_nonsingular(s, t);
  const Vec2 ca = centroid(s.active);
  const Vec2 d = s.passive[j] - ca;
  Vec2 u = p.beta1 / std::pow(d.norm(), 3) * d;
  for (int k : t.passive_nbrs[j]) {
    const Vec2 e = s.passive[k] - s.passive[j];
    u += p.beta2 * e.norm() * e;
  }
  return u;
}

// The quadratic weight of the running cost: Q = B_i B_i^T + 2 sum_{k != i}
// B_k B_k^T over the agent's own group, as a full-size diagonal matrix.
inline Matrix default_q(Group g, int idx, int m, int n) {
  const int N = 2 * (m + n);
  Matrix q(N, N);
  const int lo = g == Group::Active ? 0 : m;
  const int hi = g == Group::Active ? m : m + n;
  const int self = g == Group::Active ? idx : m + idx;
  for (int k = lo; k < hi; ++k) {
    const double w = k == self ? 1.0 : 2.0;
    q(2 * k, 2 * k) = w;
    q(2 * k + 1, 2 * k + 1) = w;
  }
  return q;
}

namespace detail {

inline double block_dot(const std::vector<double>& a, const std::vector<double>& b, int blk) {
  return a[2 * blk] * b[2 * blk] + a[2 * blk + 1] * b[2 * blk + 1];
}

}  // namespace detail

// q_i^a = x^T C^aT Q C^a x + 2 sum_j x^T C^aT B_{m+j} B_{m+j}^T C^p x
// (analogously for the passive group with the roles swapped).
inline double cost_integrand(Group g, int idx, const SystemState& s, const Topology& t,
                             const GameParams& p, const Matrix* q_override = nullptr) {
  const int m = s.m(), n = s.n();
  const std::vector<double> x = flatten(s);
  const std::vector<double> ga = c_active(s, t, p) * x;
  const std::vector<double> gp = c_passive(s, t, p) * x;
  const std::vector<double>& own = g == Group::Active ? ga : gp;

  double quad;
  if (q_override) {
    const std::vector<double> qg = *q_override * own;
    quad = 0.0;
    for (size_t i = 0; i < qg.size(); ++i) quad += own[i] * qg[i];
  } else {
    quad = 0.0;
    const int lo = g == Group::Active ? 0 : m;
    const int hi = g == Group::Active ? m : m + n;
    const int self = g == Group::Active ? idx : m + idx;
    for (int k = lo; k < hi; ++k)
      quad += (k == self ? 1.0 : 2.0) * detail::block_dot(own, own, k);
  }

  double cross = 0.0;
  if (g == Group::Active) {
    for (int j = 0; j < n; ++j) cross += detail::block_dot(ga, gp, m + j);
  } else {
    for (int i = 0; i < m; ++i) cross += detail::block_dot(gp, ga, i);
  }
  return quad + 2.0 * cross;
}

// Left side of the coupled HJB equation for one agent under the Nash
// strategies u_k = -(own-group gradient block k); identically zero for the
// unperturbed Q.
inline double hjb_residual(Group g, int idx, const SystemState& s, const Topology& t,
                           const GameParams& p, const Matrix* q_override = nullptr) {
  const int m = s.m(), n = s.n();
  const std::vector<double> x = flatten(s);
  const std::vector<double> ga = c_active(s, t, p) * x;
  const std::vector<double> gp = c_passive(s, t, p) * x;
  const std::vector<double>& own = g == Group::Active ? ga : gp;
  const std::vector<double>& other = g == Group::Active ? gp : ga;
  const int self = g == Group::Active ? idx : m + idx;
  const int own_lo = g == Group::Active ? 0 : m;
  const int own_hi = g == Group::Active ? m : m + n;

  double res = 0.5 * cost_integrand(g, idx, s, t, p, q_override);
  // grad V . (sum of all agents' Nash controls) + 0.5 ||u_self||^2
  for (int k = own_lo; k < own_hi; ++k) res -= detail::block_dot(own, own, k);
  for (int k = 0; k < m + n; ++k)
    if (k < own_lo || k >= own_hi) res -= detail::block_dot(own, other, k);
  res += 0.5 * detail::block_dot(own, own, self);
  return res;
}

struct HessianPair {
  Matrix h_active;
  Matrix h_passive;
};

// Analytic second derivatives of the two value functions (chain rule on
// the ||.||^2, 1/||.|| and ||.||^3 term shapes).
inline HessianPair hessian(const SystemState& s, const Topology& t, const GameParams& p) {
  check_nonsingular(s, t);
  const int m = s.m(), n = s.n(), N = 2 * (m + n);
  HessianPair hp{Matrix(N, N), Matrix(N, N)};
  Matrix& ha = hp.h_active;
  Matrix& hpp = hp.h_passive;

  // Active: quadratic chase term couples each active agent to the passive
  // centroid; repulsion acts on connected active pairs.
  for (int i = 0; i < m; ++i) {
    ha(2 * i, 2 * i) += p.alpha1;
    ha(2 * i + 1, 2 * i + 1) += p.alpha1;
    for (int j = 0; j < n; ++j) {
      detail::set_block(ha, i, m + j, -p.alpha1 / n);
      detail::set_block(ha, m + j, i, -p.alpha1 / n);
    }
  }
  for (int j = 0; j < n; ++j) {
    ha(2 * (m + j), 2 * (m + j)) += static_cast<double>(m) * p.alpha1 / n;
    ha(2 * (m + j) + 1, 2 * (m + j) + 1) += static_cast<double>(m) * p.alpha1 / n;
  }
  double b[2][2];
  for (int i = 0; i < m; ++i)
    for (int k : t.active_nbrs[i]) {
      detail::hess_invr(s.active[i] - s.active[k], b);
      detail::add_block2(ha, i, i, b, p.alpha2);
      detail::add_block2(ha, i, k, b, -p.alpha2);
    }

  // Passive: the 1/||x_j^p - x_c^a|| term reaches every active coordinate
  // through the centroid; the spacing term couples passive ring neighbors.
  const Vec2 ca = centroid(s.active);
  for (int j = 0; j < n; ++j) {
    detail::hess_invr(s.passive[j] - ca, b);
    detail::add_block2(hpp, m + j, m + j, b, p.beta1);
    for (int i = 0; i < m; ++i) {
      detail::add_block2(hpp, m + j, i, b, -p.beta1 / m);
      detail::add_block2(hpp, i, m + j, b, -p.beta1 / m);
      for (int k = 0; k < m; ++k) detail::add_block2(hpp, i, k, b, p.beta1 / (m * m));
    }
  }
  for (int j = 0; j < n; ++j)
    for (int k : t.passive_nbrs[j]) {
      detail::hess_cube(s.passive[j] - s.passive[k], b);
      detail::add_block2(hpp, m + j, m + j, b, p.beta2 / 6.0);
      detail::add_block2(hpp, m + j, m + k, b, -p.beta2 / 6.0);
      detail::add_block2(hpp, m + k, m + j, b, -p.beta2 / 6.0);
      detail::add_block2(hpp, m + k, m + k, b, p.beta2 / 6.0);
    }
  return hp;
}

}  // namespace encircle
