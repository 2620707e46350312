// Multi-indices and points for tensor-product spaces in up to three dimensions.
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpfe {

inline constexpr int kMaxDim = 3;

/// Point in R^d, d <= 3. Unused trailing coordinates are kept at zero.
using Point = std::array<double, kMaxDim>;

/// alpha in N_0^d. Stored inline; the dimension is part of the value.
class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(int dim) : dim_(check_dim(dim)) {}

  MultiIndex(std::initializer_list<int> entries)
      : dim_(check_dim(static_cast<int>(entries.size()))) {
    std::copy(entries.begin(), entries.end(), data_.begin());
    for (int i = 0; i < dim_; ++i)
      if (data_[i] < 0) throw std::invalid_argument("MultiIndex: negative entry");
  }

  static MultiIndex unit(int dim, int axis) {
    MultiIndex e(dim);
    e.data_.at(axis) = 1;
    return e;
  }

  int size() const { return dim_; }
  int operator[](int i) const { return data_[i]; }
  int& operator[](int i) { return data_[i]; }

  int l1_norm() const {
    int s = 0;
    for (int i = 0; i < dim_; ++i) s += data_[i];
    return s;
  }
  int linf_norm() const {
    int m = 0;
    for (int i = 0; i < dim_; ++i) m = std::max(m, data_[i]);
    return m;
  }

  MultiIndex operator+(const MultiIndex& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("MultiIndex: dimension mismatch");
    MultiIndex r(*this);
    for (int i = 0; i < dim_; ++i) r.data_[i] += o.data_[i];
    return r;
  }

  bool operator==(const MultiIndex& o) const {
    if (dim_ != o.dim_) return false;
    for (int i = 0; i < dim_; ++i)
      if (data_[i] != o.data_[i]) return false;
    return true;
  }
  bool operator<(const MultiIndex& o) const {
    if (dim_ != o.dim_) return dim_ < o.dim_;
    for (int i = 0; i < dim_; ++i)
      if (data_[i] != o.data_[i]) return data_[i] < o.data_[i];
    return false;
  }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) s += (i ? "," : "") + std::to_string(data_[i]);
    return s + ")";
  }

 private:
  static int check_dim(int d) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("MultiIndex: dimension must be 1..3");
    return d;
  }

  int dim_ = 1;
  std::array<int, kMaxDim> data_{};
};

/// Number of points of a (n per axis)^d tensor grid.
inline std::size_t tensor_size(int n, int dim) {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

/// Lexicographic position of alpha in {0..n-1}^d, axis 0 running fastest.
inline std::size_t linear_index(const MultiIndex& alpha, int n) {
  std::size_t idx = 0;
  for (int a = alpha.size() - 1; a >= 0; --a) idx = idx * n + static_cast<std::size_t>(alpha[a]);
  return idx;
}

/// Inverse of linear_index.
inline MultiIndex multi_index_at(std::size_t idx, int n, int dim) {
  MultiIndex alpha(dim);
  for (int a = 0; a < dim; ++a) {
    alpha[a] = static_cast<int>(idx % n);
    idx /= n;
  }
  return alpha;
}

/// Visits every alpha with ||alpha||_inf <= k in linear_index order.
template <class Fn>
void for_each_multi_index(int dim, int k, Fn&& fn) {
  const std::size_t total = tensor_size(k + 1, dim);
  for (std::size_t i = 0; i < total; ++i) fn(multi_index_at(i, k + 1, dim));
}

/// All alpha in N_0^d with |alpha| = order.
inline std::vector<MultiIndex> multi_indices_of_order(int dim, int order) {
  std::vector<MultiIndex> out;
  for_each_multi_index(dim, order, [&](const MultiIndex& a) {
    if (a.l1_norm() == order) out.push_back(a);
  });
  return out;
}

inline Point make_point(std::initializer_list<double> xs) {
  Point p{};
  std::size_t i = 0;
  for (double x : xs) {
    if (i >= p.size()) throw std::invalid_argument("make_point: more than 3 coordinates");
    p[i++] = x;
  }
  return p;
}

}  // namespace tpfe
