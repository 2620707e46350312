// One-dimensional and tensor-product polynomial bases: Legendre, Chebyshev,
// and barycentric Lagrange on arbitrary distinct node sets.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpfe/multi_index.hpp"

namespace tpfe {

/// Largest polynomial degree of an approximation space Q_k.
inline constexpr int kMaxDegree = 12;

// ---------------------------------------------------------------------------
// Legendre polynomials, normalized by psi_n(1) = 1.

/// psi_n(x) by the three-term recurrence.
inline double legendre_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("legendre_eval: negative degree");
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int j = 1; j < n; ++j) {
    const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// m-th derivative of psi_n at x, m >= 0.
/// Uses psi_{j+1}^{(m)} = psi_{j-1}^{(m)} + (2j+1) psi_j^{(m-1)}.
inline double legendre_derivative(int n, double x, int order) {
  if (n < 0 || order < 0) throw std::invalid_argument("legendre_derivative: negative argument");
  if (order == 0) return legendre_eval(n, x);
  if (order > n) return 0.0;
  // prev[j] holds psi_j^{(m-1)}, cur[j] holds psi_j^{(m)}.
  std::vector<double> prev(n + 1), cur(n + 1);
  prev[0] = 1.0;
  if (n >= 1) prev[1] = x;
  for (int j = 1; j < n; ++j) prev[j + 1] = ((2.0 * j + 1.0) * x * prev[j] - j * prev[j - 1]) / (j + 1.0);
  for (int m = 1; m <= order; ++m) {
    std::fill(cur.begin(), cur.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      const double lower = (j >= 1) ? cur[j - 1] : 0.0;
      cur[j + 1] = lower + (2.0 * j + 1.0) * prev[j];
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

// ---------------------------------------------------------------------------
// Chebyshev polynomials.

/// T_n(x), first kind.
inline double chebyshev_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("chebyshev_eval: negative degree");
  if (n == 0) return 1.0;
  double t0 = 1.0, t1 = x;
  for (int j = 1; j < n; ++j) {
    const double t2 = 2.0 * x * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

/// U_n(x), second kind.
inline double chebyshev_second_kind_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("chebyshev_second_kind_eval: negative degree");
  if (n == 0) return 1.0;
  double u0 = 1.0, u1 = 2.0 * x;
  for (int j = 1; j < n; ++j) {
    const double u2 = 2.0 * x * u1 - u0;
    u0 = u1;
    u1 = u2;
  }
  return u1;
}

/// m-th derivative of T_n at x, from T_{j+1}^{(m)} = 2x T_j^{(m)} + 2m T_j^{(m-1)} - T_{j-1}^{(m)}.
inline double chebyshev_derivative(int n, double x, int order) {
  if (n < 0 || order < 0) throw std::invalid_argument("chebyshev_derivative: negative argument");
  if (order == 0) return chebyshev_eval(n, x);
  if (order > n) return 0.0;
  std::vector<double> prev(n + 1), cur(n + 1);
  prev[0] = 1.0;
  if (n >= 1) prev[1] = x;
  for (int j = 1; j < n; ++j) prev[j + 1] = 2.0 * x * prev[j] - prev[j - 1];
  for (int m = 1; m <= order; ++m) {
    std::fill(cur.begin(), cur.end(), 0.0);
    if (m == 1 && n >= 1) cur[1] = 1.0;
    for (int j = 1; j < n; ++j) cur[j + 1] = 2.0 * x * cur[j] + 2.0 * m * prev[j] - cur[j - 1];
    std::swap(prev, cur);
  }
  return prev[n];
}

// ---------------------------------------------------------------------------
// Monomial-coefficient helpers (ascending powers).

using Coefficients = std::vector<double>;

inline double horner(const Coefficients& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline Coefficients multiply(const Coefficients& a, const Coefficients& b) {
  Coefficients r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

/// Monomial coefficients of T_n; integers, exact in double for n <= 16.
inline Coefficients chebyshev_coefficients(int n) {
  Coefficients t0{1.0}, t1{0.0, 1.0};
  if (n == 0) return t0;
  for (int j = 1; j < n; ++j) {
    Coefficients t2(j + 2, 0.0);
    for (int i = 0; i <= j; ++i) t2[i + 1] += 2.0 * t1[i];
    for (std::size_t i = 0; i < t0.size(); ++i) t2[i] -= t0[i];
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  return t1;
}

/// Exact division of a by (1 - x^2). Throws if the remainder is nonzero.
inline Coefficients divide_by_one_minus_x_squared(Coefficients a) {
  // a = (1 - x^2) q  <=>  a = -(x^2 - 1) q; long division from the top.
  const int deg = static_cast<int>(a.size()) - 1;
  if (deg < 2) throw std::invalid_argument("divide_by_one_minus_x_squared: degree < 2");
  Coefficients q(deg - 1, 0.0);
  for (int i = deg; i >= 2; --i) {
    const double lead = -a[i];  // coefficient of x^{i-2} in q
    q[i - 2] = lead;
    a[i] = 0.0;
    a[i - 2] -= lead;
  }
  if (a[0] != 0.0 || a[1] != 0.0)
    throw std::runtime_error("divide_by_one_minus_x_squared: nonzero remainder");
  return q;
}

/// p(x) = ((1 - T_n(x)^2) / (1 - x^2))^2, a polynomial of degree 4n-4.
/// The quotient is formed on integer monomial coefficients, evaluated by Horner
/// and squared, so x = +-1 needs no special casing (p(+-1) = n^4).
inline double timan_example_eval(int n, double x) {
  if (n < 1) throw std::invalid_argument("timan_example_eval: n must be >= 1");
  if (n > 16) throw std::invalid_argument("timan_example_eval: n > 16 exceeds exact coefficient range");
  const Coefficients t = chebyshev_coefficients(n);
  Coefficients a = multiply(t, t);
  for (double& c : a) c = -c;
  a[0] += 1.0;
  const double q = horner(divide_by_one_minus_x_squared(std::move(a)), x);
  return q * q;
}

// ---------------------------------------------------------------------------
// Node sets and Lagrange bases.

enum class NodeFamily { Gauss, GaussLobatto, Equispaced, Custom };

inline std::string to_string(NodeFamily f) {
  switch (f) {
    case NodeFamily::Gauss: return "gauss";
    case NodeFamily::GaussLobatto: return "gauss-lobatto";
    case NodeFamily::Equispaced: return "equispaced";
    case NodeFamily::Custom: return "custom";
  }
  return "custom";
}

inline NodeFamily node_family_from_string(const std::string& s) {
  if (s == "gauss" || s == "g") return NodeFamily::Gauss;
  if (s == "gauss-lobatto" || s == "gl" || s == "lobatto") return NodeFamily::GaussLobatto;
  if (s == "equispaced" || s == "eq") return NodeFamily::Equispaced;
  throw std::invalid_argument("unknown node family '" + s + "'");
}

/// Strictly increasing, pairwise distinct nodes in [-1, 1].
class NodeSet1D {
 public:
  NodeSet1D(std::vector<double> nodes, NodeFamily family = NodeFamily::Custom)
      : nodes_(std::move(nodes)), family_(family) {
    if (nodes_.empty()) throw std::invalid_argument("NodeSet1D: empty node set");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!(nodes_[i] >= -1.0 && nodes_[i] <= 1.0))
        throw std::invalid_argument("NodeSet1D: node outside [-1, 1]");
      if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
        throw std::invalid_argument("NodeSet1D: nodes must be strictly increasing");
    }
  }

  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& values() const { return nodes_; }
  NodeFamily family() const { return family_; }

 private:
  std::vector<double> nodes_;
  NodeFamily family_;
};

inline NodeSet1D equispaced_nodes(int k) {
  if (k < 1) throw std::invalid_argument("equispaced_nodes: k must be >= 1");
  std::vector<double> x(k + 1);
  for (int i = 0; i <= k; ++i) x[i] = -1.0 + 2.0 * i / k;
  x.front() = -1.0;
  x.back() = 1.0;
  return NodeSet1D(std::move(x), NodeFamily::Equispaced);
}

/// Lagrange basis phi_0..phi_k on a node set, barycentric second form.
/// Immutable; share through std::shared_ptr<const LagrangeBasis1D>.
class LagrangeBasis1D {
 public:
  explicit LagrangeBasis1D(NodeSet1D nodes) : nodes_(std::move(nodes)) {
    const std::size_t n = nodes_.size();
    weights_.assign(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t m = 0; m < n; ++m)
        if (m != j) weights_[j] *= (nodes_[j] - nodes_[m]);
      weights_[j] = 1.0 / weights_[j];
    }
    const double scale = *std::max_element(weights_.begin(), weights_.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
    for (double& w : weights_) w /= std::abs(scale);

    diff_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double diag = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double dij = (weights_[j] / weights_[i]) / (nodes_[i] - nodes_[j]);
        diff_[i * n + j] = dij;
        diag -= dij;
      }
      diff_[i * n + i] = diag;
    }
  }

  int degree() const { return static_cast<int>(nodes_.size()) - 1; }
  std::size_t size() const { return nodes_.size(); }
  const NodeSet1D& nodes() const { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& barycentric_weights() const { return weights_; }

  /// D(i, j) = phi_j'(x_i).
  double differentiation_matrix(std::size_t i, std::size_t j) const { return diff_[i * size() + j]; }

  /// All phi_j(x) into out (size k+1). Exact Kronecker values at nodes.
  void values(double x, std::span<double> out) const {
    const std::size_t n = size();
    for (std::size_t j = 0; j < n; ++j) {
      if (x == nodes_[j]) {
        std::fill(out.begin(), out.begin() + n, 0.0);
        out[j] = 1.0;
        return;
      }
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = weights_[j] / (x - nodes_[j]);
      denom += out[j];
    }
    for (std::size_t j = 0; j < n; ++j) out[j] /= denom;
  }

  std::vector<double> values(double x) const {
    std::vector<double> out(size());
    values(x, out);
    return out;
  }

  /// Nodal values of u' for nodal values u; exactly zero for constant u.
  void differentiate_nodal(std::span<const double> u, std::span<double> du) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) acc += diff_[i * n + j] * (u[j] - u[i]);
      du[i] = acc;
    }
  }

  /// Interpolant of nodal values u evaluated at x.
  double interpolate(std::span<const double> u, double x) const {
    std::vector<double> phi(size());
    values(x, phi);
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += u[j] * phi[j];
    return s;
  }

 private:
  NodeSet1D nodes_;
  std::vector<double> weights_;
  std::vector<double> diff_;
};

inline void check_basis_index(const LagrangeBasis1D& basis, int i) {
  if (i < 0 || i > basis.degree())
    throw std::out_of_range("Lagrange basis index " + std::to_string(i) + " outside 0.." +
                            std::to_string(basis.degree()));
}

/// phi_i(x).
inline double lagrange_eval(const LagrangeBasis1D& basis, int i, double x) {
  check_basis_index(basis, i);
  return basis.values(x)[i];
}

/// phi_i'(x) = sum_j D(j, i) phi_j(x).
inline double lagrange_derivative(const LagrangeBasis1D& basis, int i, double x) {
  check_basis_index(basis, i);
  const auto phi = basis.values(x);
  double s = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j) s += basis.differentiation_matrix(j, i) * phi[j];
  return s;
}

/// phi_alpha(x) = prod_a phi_{alpha_a}(x_a).
inline double tensor_basis_eval(const MultiIndex& alpha, const LagrangeBasis1D& basis,
                                std::span<const double> point) {
  if (static_cast<int>(point.size()) != alpha.size())
    throw std::invalid_argument("tensor_basis_eval: dimension mismatch between multi-index and point");
  if (alpha.linf_norm() > basis.degree())
    throw std::out_of_range("tensor_basis_eval: ||alpha||_inf exceeds basis degree");
  double v = 1.0;
  for (int a = 0; a < alpha.size(); ++a) v *= lagrange_eval(basis, alpha[a], point[a]);
  return v;
}

}  // namespace tpfe
