#pragma once

// Planar rotations, tangent-space bases of the translation manifold, and
// alignment distance to a reference pattern modulo rotation, translation
// and per-group dihedral relabelings.

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "encircle/errors.hpp"

namespace encircle {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

class Rot2 {
 public:
  Rot2() = default;
  static Rot2 from_angle(double theta) { return Rot2(std::cos(theta), std::sin(theta)); }

  Vec2 operator*(Vec2 v) const { return {c_ * v.x - s_ * v.y, s_ * v.x + c_ * v.y}; }
  Rot2 operator*(Rot2 o) const { return Rot2(c_ * o.c_ - s_ * o.s_, s_ * o.c_ + c_ * o.s_); }
  Rot2 transposed() const { return Rot2(c_, -s_); }

  Rot2 pow(int k) const {
    Rot2 r;
    Rot2 base = k >= 0 ? *this : transposed();
    for (int i = 0; i < std::abs(k); ++i) r = r * base;
    return r;
  }

  double cos() const { return c_; }
  double sin() const { return s_; }

 private:
  Rot2(double c, double s) : c_(c), s_(s) {}
  double c_ = 1.0, s_ = 0.0;
};

// Fixed generator L of so(2); rotation_direction = (I ⊗ L) x.
inline Vec2 apply_generator(Vec2 v) { return {-v.y, v.x}; }

struct TangentBasis {
  std::vector<double> rotation_direction;
  std::array<std::vector<double>, 2> translation_directions;
};

// base: flat coordinates (x0,y0,x1,y1,...) of the m+n points.
inline TangentBasis tangent_basis(const std::vector<double>& base) {
  const int npts = static_cast<int>(base.size()) / 2;
  // Collinearity: singular values of the centered 2xN coordinate matrix.
  double cx = 0.0, cy = 0.0;
  for (int i = 0; i < npts; ++i) {
    cx += base[2 * i];
    cy += base[2 * i + 1];
  }
  cx /= npts;
  cy /= npts;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double dx = base[2 * i] - cx, dy = base[2 * i + 1] - cy;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double lmax = tr / 2.0 + disc;
  const double lmin = std::max(0.0, tr / 2.0 - disc);
  if (std::sqrt(lmin) <= 1e-9 * std::sqrt(lmax))
    throw CollinearInput("tangent_basis: base points are collinear");

  TangentBasis tb;
  tb.rotation_direction.resize(2 * npts);
  tb.translation_directions[0].assign(2 * npts, 0.0);
  tb.translation_directions[1].assign(2 * npts, 0.0);
  for (int i = 0; i < npts; ++i) {
    tb.rotation_direction[2 * i] = -base[2 * i + 1];
    tb.rotation_direction[2 * i + 1] = base[2 * i];
    tb.translation_directions[0][2 * i] = 1.0;
    tb.translation_directions[1][2 * i + 1] = 1.0;
  }
  return tb;
}

namespace detail {

// Residual after optimal shared rotation/translation (planar Procrustes)
// between matched point lists; returns the squared norm.
inline double procrustes_sq(const std::vector<Vec2>& s, const std::vector<Vec2>& p,
                            bool allow_translation) {
  const int n = static_cast<int>(s.size());
  Vec2 sc{0, 0}, pc{0, 0};
  if (allow_translation) {
    for (int i = 0; i < n; ++i) {
      sc += s[i];
      pc += p[i];
    }
    sc = sc * (1.0 / n);
    pc = pc * (1.0 / n);
  }
  double dot = 0.0, cross = 0.0, ss = 0.0, pp = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 a = s[i] - sc, b = p[i] - pc;
    dot += b.dot(a);
    cross += b.cross(a);
    ss += a.norm2();
    pp += b.norm2();
  }
  // angle = atan2(cross, dot) maximizes cos*dot + sin*cross. Summing the
  // residuals explicitly (instead of ss + pp - 2*hypot(dot, cross)) avoids
  // the cancellation that would floor near-zero distances around 1e-7.
  const double c = std::cos(std::atan2(cross, dot));
  const double sn = std::sin(std::atan2(cross, dot));
  double resid = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 a = s[i] - sc, b = p[i] - pc;
    const Vec2 rb{c * b.x - sn * b.y, sn * b.x + c * b.y};
    resid += (a - rb).norm2();
  }
  return resid;
}

inline void apply_dihedral(const std::vector<Vec2>& pat, int shift, bool refl,
                           std::vector<Vec2>& out) {
  const int k = static_cast<int>(pat.size());
  for (int i = 0; i < k; ++i) {
    const int j = refl ? ((shift - i) % k + k) % k : (shift + i) % k;
    out[i] = pat[j];
  }
}

}  // namespace detail

// Minimum over shared rotation R, shared translation s and per-group
// dihedral relabelings of ||state - (R * perm(pattern) + s)||.
inline double pattern_distance_groups(const std::vector<Vec2>& state_active,
                                      const std::vector<Vec2>& state_passive,
                                      const std::vector<Vec2>& pat_active,
                                      const std::vector<Vec2>& pat_passive) {
  if (state_active.size() != pat_active.size() || state_passive.size() != pat_passive.size())
    throw SizeMismatch("pattern_distance: group sizes differ from pattern");
  const int m = static_cast<int>(pat_active.size());
  const int n = static_cast<int>(pat_passive.size());

  std::vector<Vec2> s(m + n), p(m + n), pa(m), pp(n);
  for (int i = 0; i < m; ++i) s[i] = state_active[i];
  for (int j = 0; j < n; ++j) s[m + j] = state_passive[j];

  double best = std::numeric_limits<double>::infinity();
  for (int ra = 0; ra < m; ++ra)
    for (int fa = 0; fa < 2; ++fa) {
      detail::apply_dihedral(pat_active, ra, fa != 0, pa);
      for (int i = 0; i < m; ++i) p[i] = pa[i];
      for (int rp = 0; rp < n; ++rp)
        for (int fp = 0; fp < 2; ++fp) {
          detail::apply_dihedral(pat_passive, rp, fp != 0, pp);
          for (int j = 0; j < n; ++j) p[m + j] = pp[j];
          best = std::min(best, detail::procrustes_sq(s, p, /*allow_translation=*/true));
        }
    }
  return std::sqrt(best);
}

// Rotation-only alignment path for a single group (per-group manifold M_R):
// translation forced to zero, dihedral relabelings still searched.
inline double rotation_align_distance(const std::vector<Vec2>& state,
                                      const std::vector<Vec2>& pattern) {
  if (state.size() != pattern.size())
    throw SizeMismatch("rotation_align_distance: sizes differ");
  const int k = static_cast<int>(state.size());
  std::vector<Vec2> p(k);
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < k; ++r)
    for (int f = 0; f < 2; ++f) {
      detail::apply_dihedral(pattern, r, f != 0, p);
      best = std::min(best, detail::procrustes_sq(state, p, /*allow_translation=*/false));
    }
  return std::sqrt(best);
}

}  // namespace encircle
