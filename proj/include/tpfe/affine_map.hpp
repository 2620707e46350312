// Affine reference maps F_T(xhat) = J xhat + b from [-1,1]^d onto an element.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "tpfe/linalg.hpp"
#include "tpfe/multi_index.hpp"

namespace tpfe {

using Mat3 = std::array<std::array<double, kMaxDim>, kMaxDim>;

class AffineMap {
 public:
  AffineMap() : AffineMap(identity(1)) {}

  AffineMap(int dim, const Mat3& jac, const Point& shift) : dim_(dim), jac_(jac), shift_(shift) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("AffineMap: dimension must be 1..3");
    for (int i = 0; i < kMaxDim; ++i)
      for (int j = 0; j < kMaxDim; ++j)
        if (i >= dim || j >= dim) jac_[i][j] = 0.0;
    for (int i = dim; i < kMaxDim; ++i) shift_[i] = 0.0;

    det_ = determinant();
    double scale = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) scale = std::max(scale, std::abs(jac_[i][j]));
    if (!(std::abs(det_) > 1e-14 * std::pow(scale, dim)) || scale == 0.0)
      throw std::invalid_argument("AffineMap: singular Jacobian");
    invert();

    const Matrix jtj = gram(jac_);
    const auto eig = symmetric_eigenvalues(jtj, 1e-13);
    norm_ = std::sqrt(eig.eigenvalues.back());
    inv_norm_ = 1.0 / std::sqrt(eig.eigenvalues.front());
  }

  static AffineMap identity(int dim) {
    Mat3 j{};
    for (int i = 0; i < dim; ++i) j[i][i] = 1.0;
    return AffineMap(dim, j, Point{});
  }

  /// Axis-aligned box [lo, hi] as the image of [-1,1]^d.
  static AffineMap box(int dim, const Point& lo, const Point& hi) {
    Mat3 j{};
    Point b{};
    for (int i = 0; i < dim; ++i) {
      j[i][i] = 0.5 * (hi[i] - lo[i]);
      b[i] = 0.5 * (hi[i] + lo[i]);
    }
    return AffineMap(dim, j, b);
  }

  int dim() const { return dim_; }
  const Mat3& jacobian() const { return jac_; }
  const Mat3& inverse_jacobian() const { return inv_; }
  const Point& shift() const { return shift_; }
  double det() const { return det_; }
  double abs_det() const { return std::abs(det_); }
  /// ||J||_2 and ||J^{-1}||_2 from the eigenvalues of J^T J.
  double spectral_norm() const { return norm_; }
  double inverse_spectral_norm() const { return inv_norm_; }

  bool is_diagonal() const {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        if (i != j && jac_[i][j] != 0.0) return false;
    return true;
  }

  Point operator()(const Point& xhat) const {
    Point x{};
    for (int i = 0; i < dim_; ++i) {
      double s = shift_[i];
      for (int j = 0; j < dim_; ++j) s += jac_[i][j] * xhat[j];
      x[i] = s;
    }
    return x;
  }

  Point inverse(const Point& x) const {
    Point xhat{};
    for (int i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (int j = 0; j < dim_; ++j) s += inv_[i][j] * (x[j] - shift_[j]);
      xhat[i] = s;
    }
    return xhat;
  }

 private:
  double determinant() const {
    const auto& a = jac_;
    switch (dim_) {
      case 1: return a[0][0];
      case 2: return a[0][0] * a[1][1] - a[0][1] * a[1][0];
      default:
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    }
  }

  void invert() {
    const auto& a = jac_;
    inv_ = Mat3{};
    switch (dim_) {
      case 1: inv_[0][0] = 1.0 / a[0][0]; break;
      case 2:
        inv_[0][0] = a[1][1] / det_;
        inv_[0][1] = -a[0][1] / det_;
        inv_[1][0] = -a[1][0] / det_;
        inv_[1][1] = a[0][0] / det_;
        break;
      default:
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            inv_[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / det_;
          }
    }
  }

  Matrix gram(const Mat3& j) const {
    Matrix g(dim_, dim_);
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c) {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += j[i][r] * j[i][c];
        g(r, c) = s;
      }
    return g;
  }

  int dim_ = 1;
  Mat3 jac_{};
  Mat3 inv_{};
  Point shift_{};
  double det_ = 1.0;
  double norm_ = 1.0;
  double inv_norm_ = 1.0;
};

}  // namespace tpfe
