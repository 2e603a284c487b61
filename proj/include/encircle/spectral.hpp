#pragma once

// Circulant-with-rotation block diagonalization, zero-eigenvalue counting
// and the kernel-equals-tangent-space certificate. Complex arithmetic is
// confined to this module.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "encircle/errors.hpp"
#include "encircle/geometry.hpp"
#include "encircle/linalg.hpp"

namespace encircle {

using cplx = std::complex<double>;

struct Mat2c {
  cplx e[2][2]{};
};

// H has block (r, c) = R^r C_{(c-r) mod m} R^{-r}; symmetry of H constrains
// the blocks to C_j = R^j C_{m-j} R^{-j}.
class BlockRotCirculant {
 public:
  BlockRotCirculant(int m, Rot2 rotation, std::vector<Matrix> blocks)
      : m_(m), rot_(rotation), blocks_(std::move(blocks)) {
    if (static_cast<int>(blocks_.size()) != m_ || m_ < 1)
      throw SizeMismatch("BlockRotCirculant: need exactly m blocks");
    for (const Matrix& b : blocks_) {
      if (b.rows() != 2 || b.cols() != 2)
        throw SizeMismatch("BlockRotCirculant: blocks must be 2x2");
      if (std::abs(b(0, 1) - b(1, 0)) > 1e-12 * std::max(1.0, b.max_abs()))
        throw NotSymmetric("BlockRotCirculant: block not symmetric");
    }
    const Rot2 rm = rot_.pow(m_);
    if (std::abs(rm.cos() - 1.0) > 1e-9 || std::abs(rm.sin()) > 1e-9)
      throw InvalidRotation("BlockRotCirculant: rotation^m != I (angle not 2 pi k/m)");
    assembled_ = assemble_();
    if (!assembled_.is_symmetric(1e-10 * std::max(1.0, assembled_.max_abs())))
      throw NotSymmetric("BlockRotCirculant: assembled matrix not symmetric");
  }

  int block_count() const { return m_; }
  Rot2 rotation() const { return rot_; }
  const Matrix& block(int j) const { return blocks_[j]; }
  const Matrix& assembled() const { return assembled_; }

 private:
  Matrix assemble_() const {
    Matrix h(2 * m_, 2 * m_);
    for (int r = 0; r < m_; ++r) {
      const Rot2 rr = rot_.pow(r);
      const double rc = rr.cos(), rs = rr.sin();
      for (int c = 0; c < m_; ++c) {
        const Matrix& b = blocks_[((c - r) % m_ + m_) % m_];
        // R^r B R^{-r}
        const double t00 = rc * b(0, 0) - rs * b(1, 0), t01 = rc * b(0, 1) - rs * b(1, 1);
        const double t10 = rs * b(0, 0) + rc * b(1, 0), t11 = rs * b(0, 1) + rc * b(1, 1);
        h(2 * r, 2 * c) = t00 * rc - t01 * rs;
        h(2 * r, 2 * c + 1) = t00 * rs + t01 * rc;
        h(2 * r + 1, 2 * c) = t10 * rc - t11 * rs;
        h(2 * r + 1, 2 * c + 1) = t10 * rs + t11 * rc;
      }
    }
    return h;
  }

  int m_;
  Rot2 rot_;
  std::vector<Matrix> blocks_;
  Matrix assembled_;
};

// D_k = C_0 + sum_{j=1}^{m-1} w^{jk} R^{m-j} C_j, w = exp(-2 pi i/m).
inline std::vector<Mat2c> dk_matrices(const BlockRotCirculant& c) {
  const int m = c.block_count();
  std::vector<Mat2c> out(m);
  for (int k = 0; k < m; ++k) {
    Mat2c d;
    d.e[0][0] = c.block(0)(0, 0);
    d.e[0][1] = c.block(0)(0, 1);
    d.e[1][0] = c.block(0)(1, 0);
    d.e[1][1] = c.block(0)(1, 1);
    for (int j = 1; j < m; ++j) {
      const cplx w = std::exp(cplx(0.0, -2.0 * std::numbers::pi * j * k / m));
      const Rot2 r = c.rotation().pow(m - j);
      const Matrix& b = c.block(j);
      // R^{m-j} C_j
      const double p00 = r.cos() * b(0, 0) - r.sin() * b(1, 0);
      const double p01 = r.cos() * b(0, 1) - r.sin() * b(1, 1);
      const double p10 = r.sin() * b(0, 0) + r.cos() * b(1, 0);
      const double p11 = r.sin() * b(0, 1) + r.cos() * b(1, 1);
      d.e[0][0] += w * p00;
      d.e[0][1] += w * p01;
      d.e[1][0] += w * p10;
      d.e[1][1] += w * p11;
    }
    out[k] = d;
  }
  return out;
}

namespace detail {

struct Eig2c {
  cplx values[2];
  cplx vectors[2][2];  // vectors[v][component]
};

inline Eig2c eig2c(const Mat2c& d) {
  Eig2c e;
  const cplx tr = d.e[0][0] + d.e[1][1];
  const cplx det = d.e[0][0] * d.e[1][1] - d.e[0][1] * d.e[1][0];
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  e.values[0] = (tr - disc) / 2.0;
  e.values[1] = (tr + disc) / 2.0;
  for (int v = 0; v < 2; ++v) {
    const cplx lam = e.values[v];
    // rows of (D - lam I) are both orthogonal to the eigenvector
    const cplx r0[2] = {d.e[0][0] - lam, d.e[0][1]};
    const cplx r1[2] = {d.e[1][0], d.e[1][1] - lam};
    const double n0 = std::norm(r0[0]) + std::norm(r0[1]);
    const double n1 = std::norm(r1[0]) + std::norm(r1[1]);
    if (n0 < 1e-30 && n1 < 1e-30) {
      // D = lam I: any basis vector
      e.vectors[v][0] = v == 0 ? 1.0 : 0.0;
      e.vectors[v][1] = v == 0 ? 0.0 : 1.0;
    } else if (n0 >= n1) {
      e.vectors[v][0] = -r0[1];
      e.vectors[v][1] = r0[0];
    } else {
      e.vectors[v][0] = -r1[1];
      e.vectors[v][1] = r1[0];
    }
  }
  return e;
}

}  // namespace detail

// Assembles v_{k,l} (block r = w^{k((m-r) mod m)} R^r psi_l) from the
// eigenvectors of each D_k and returns max_{k,l} ||H v - lambda v||/||v||.
inline double verify_eigvectors(const BlockRotCirculant& c) {
  const int m = c.block_count();
  const Matrix& h = c.assembled();
  const std::vector<Mat2c> dks = dk_matrices(c);
  double worst = 0.0;
  for (int k = 0; k < m; ++k) {
    const detail::Eig2c e = detail::eig2c(dks[k]);
    for (int l = 0; l < 2; ++l) {
      std::vector<cplx> v(2 * m);
      for (int r = 0; r < m; ++r) {
        const cplx w = std::exp(cplx(0.0, -2.0 * std::numbers::pi * k * ((m - r) % m) / m));
        const Rot2 rr = c.rotation().pow(r);
        const cplx p0 = e.vectors[l][0], p1 = e.vectors[l][1];
        v[2 * r] = w * (rr.cos() * p0 - rr.sin() * p1);
        v[2 * r + 1] = w * (rr.sin() * p0 + rr.cos() * p1);
      }
      double vn = 0.0, rn = 0.0;
      for (const cplx& z : v) vn += std::norm(z);
      for (int r = 0; r < 2 * m; ++r) {
        cplx hv = 0.0;
        for (int s = 0; s < 2 * m; ++s) hv += h(r, s) * v[s];
        rn += std::norm(hv - e.values[l] * v[r]);
      }
      worst = std::max(worst, std::sqrt(rn / vn));
    }
  }
  return worst;
}

// Real eigenvalues of all D_k blocks; imaginary parts below 1e-9 truncated
// (H is real symmetric, so the spectrum is real up to rounding).
inline std::vector<double> dk_eigenvalues(const BlockRotCirculant& c) {
  std::vector<double> out;
  for (const Mat2c& d : dk_matrices(c)) {
    const detail::Eig2c e = detail::eig2c(d);
    for (int l = 0; l < 2; ++l) out.push_back(e.values[l].real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline int zero_count(const Matrix& m, double rel_tol) {
  const SymEigen eig = jacobi_eigen(m);
  double amax = 0.0;
  for (double v : eig.values) amax = std::max(amax, std::abs(v));
  const double tol = rel_tol * std::max(1.0, amax);
  int count = 0;
  for (double v : eig.values)
    if (std::abs(v) < tol) ++count;
  return count;
}

struct SpectralReport {
  std::vector<double> eigenvalues;
  int zero_count = 0;
  double kernel_residual = 0.0;
  double min_nonzero = 0.0;
  bool nonzero_all_positive = false;
};

// Kernel basis vs tangent space: kernel_residual is the Frobenius norm of
// (kernel basis - its projection onto span(tangent_basis(base_coords))).
inline SpectralReport kernel_matches_tangent(const Matrix& h, const std::vector<double>& base,
                                             double rel_tol = 1e-8) {
  const SymEigen eig = jacobi_eigen(h);
  SpectralReport rep;
  rep.eigenvalues = eig.values;
  double amax = 0.0;
  for (double v : eig.values) amax = std::max(amax, std::abs(v));
  const double tol = rel_tol * std::max(1.0, amax);

  const TangentBasis tb = tangent_basis(base);
  std::vector<std::vector<double>> q{tb.rotation_direction, tb.translation_directions[0],
                                     tb.translation_directions[1]};
  // Gram-Schmidt the 3 tangent vectors
  for (size_t i = 0; i < q.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      double d = 0.0;
      for (size_t k = 0; k < q[i].size(); ++k) d += q[i][k] * q[j][k];
      for (size_t k = 0; k < q[i].size(); ++k) q[i][k] -= d * q[j][k];
    }
    double nn = 0.0;
    for (double v : q[i]) nn += v * v;
    nn = std::sqrt(nn);
    for (double& v : q[i]) v /= nn;
  }

  const int N = h.rows();
  double resid2 = 0.0;
  rep.min_nonzero = std::numeric_limits<double>::infinity();
  rep.nonzero_all_positive = true;
  for (int c = 0; c < N; ++c) {
    if (std::abs(eig.values[c]) < tol) {
      ++rep.zero_count;
      std::vector<double> k(N);
      for (int r = 0; r < N; ++r) k[r] = eig.vectors(r, c);
      for (const auto& qv : q) {
        double d = 0.0;
        for (int r = 0; r < N; ++r) d += k[r] * qv[r];
        for (int r = 0; r < N; ++r) k[r] -= d * qv[r];
      }
      for (int r = 0; r < N; ++r) resid2 += k[r] * k[r];
    } else {
      rep.min_nonzero = std::min(rep.min_nonzero, eig.values[c]);
      if (eig.values[c] < 0.0) rep.nonzero_all_positive = false;
    }
  }
  rep.kernel_residual = std::sqrt(resid2);
  if (rep.zero_count == N) rep.min_nonzero = 0.0;
  return rep;
}

}  // namespace encircle
