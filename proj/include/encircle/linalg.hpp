#pragma once

// Small dense real matrices and a cyclic Jacobi eigensolver for symmetric
// matrices. Problem sizes here top out around 50x50, so no attempt is made
// at blocking or sparsity.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "encircle/errors.hpp"

namespace encircle {

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<size_t>(rows) * cols, 0.0) {}

  static Matrix identity(int n) {
    Matrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return d_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return d_[static_cast<size_t>(r) * cols_ + c]; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  Matrix operator*(const Matrix& o) const {
    Matrix out(rows_, o.cols_);
    for (int r = 0; r < rows_; ++r)
      for (int k = 0; k < cols_; ++k) {
        const double v = (*this)(r, k);
        if (v == 0.0) continue;
        for (int c = 0; c < o.cols_; ++c) out(r, c) += v * o(k, c);
      }
    return out;
  }

  std::vector<double> operator*(const std::vector<double>& v) const {
    std::vector<double> out(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (int c = 0; c < cols_; ++c) s += (*this)(r, c) * v[c];
      out[r] = s;
    }
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    for (size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
    return *this;
  }

  Matrix& operator*=(double s) {
    for (double& v : d_) v *= s;
    return *this;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : d_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (double v : d_) s += v * v;
    return std::sqrt(s);
  }

  bool is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    for (int r = 0; r < rows_; ++r)
      for (int c = r + 1; c < cols_; ++c)
        if (std::abs((*this)(r, c) - (*this)(c, r)) > tol) return false;
    return true;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> d_;
};

struct SymEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

// Cyclic Jacobi for symmetric matrices; converges to off-diagonal Frobenius
// norm below 1e-14 of the matrix scale.
inline SymEigen jacobi_eigen(const Matrix& a_in) {
  const int n = a_in.rows();
  if (!a_in.is_symmetric(1e-10 * std::max(1.0, a_in.max_abs())))
    throw NotSymmetric("jacobi_eigen: matrix not symmetric");
  Matrix a = a_in;
  Matrix v = Matrix::identity(n);
  const double scale = std::max(1.0, a.max_abs());

  auto offdiag = [&]() {
    double s = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c) s += a(r, c) * a(r, c);
    return std::sqrt(2.0 * s);
  };

  for (int sweep = 0; sweep < 100 && offdiag() > 1e-14 * scale; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

  SymEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (int r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

}  // namespace encircle
