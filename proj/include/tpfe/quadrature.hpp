// Interpolatory quadrature rules on [-1,1] and [-1,1]^d: Gauss, Gauss-Lobatto
// and closed equispaced (Newton-Cotes) rules.
#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tpfe/affine_map.hpp"
#include "tpfe/multi_index.hpp"
#include "tpfe/polybasis.hpp"

namespace tpfe {

/// Internal rules (oversampled integration) may go beyond kMaxDegree.
inline constexpr int kMaxRuleDegree = 60;

struct QuadRule1D {
  NodeFamily family;
  int k;  // degree of the associated Q_k space, k+1 nodes
  NodeSet1D nodes;
  std::vector<double> weights;
  int dop;

  std::size_t size() const { return weights.size(); }
};

inline QuadRule1D gauss_rule(int k);

namespace detail {

inline void check_rule_degree(int k, int lo, const char* who) {
  if (k < lo || k > kMaxRuleDegree)
    throw std::invalid_argument(std::string(who) + ": degree " + std::to_string(k) + " out of range");
}

/// Newton iteration for a root of f near x0. fd returns {f(x), f'(x)}.
template <class FD>
double newton_root(FD&& fd, double x0, const char* who) {
  double x = x0;
  for (int it = 0; it < 100; ++it) {
    const auto [f, df] = fd(x);
    if (std::abs(f) <= 1e-14) return x;
    const double dx = f / df;
    x -= dx;
    if (std::abs(dx) <= 4e-16 * std::max(1.0, std::abs(x))) return x;
  }
  throw std::runtime_error(std::string(who) + ": Newton iteration did not converge");
}

/// Fills the upper half by mirroring x -> -x. The centre node, if any, is 0.
inline void symmetrize(std::vector<double>& x) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n / 2; ++i) x[n - 1 - i] = -x[i];
  if (n % 2 == 1) x[n / 2] = 0.0;
}

/// w_i = integral of phi_i over [-1,1], computed with a Gauss rule that is exact
/// for the degree-(n-1) Lagrange polynomials.
inline std::vector<double> integrate_lagrange_basis(const NodeSet1D& nodes) {
  const std::size_t n = nodes.size();
  if (n == 1) return {2.0};
  const int aux_k = static_cast<int>((n + 1) / 2) - 1;  // 2(aux_k+1)-1 >= n-1
  const QuadRule1D aux = gauss_rule(aux_k);
  const LagrangeBasis1D basis(nodes);
  std::vector<double> w(n, 0.0), phi(n);
  for (std::size_t q = 0; q < aux.size(); ++q) {
    basis.values(aux.nodes[q], phi);
    for (std::size_t i = 0; i < n; ++i) w[i] += aux.weights[q] * phi[i];
  }
  return w;
}

inline void check_positive(const std::vector<double>& w, const char* who) {
  for (double v : w)
    if (!(v > 0.0)) throw std::domain_error(std::string(who) + ": rule has a non-positive weight");
}

}  // namespace detail

/// k+1 roots of psi_{k+1}; dop 2k+1.
inline QuadRule1D gauss_rule(int k) {
  detail::check_rule_degree(k, 0, "gauss_rule");
  const int n = k + 1;
  std::vector<double> x(n, 0.0);
  for (int j = 0; j < n / 2; ++j) {
    const double guess = -std::cos(std::numbers::pi * (j + 0.5) / n);
    x[j] = detail::newton_root(
        [n](double t) { return std::pair{legendre_eval(n, t), legendre_derivative(n, t, 1)}; }, guess,
        "gauss_rule");
  }
  detail::symmetrize(x);
  NodeSet1D nodes(std::move(x), NodeFamily::Gauss);
  auto w = detail::integrate_lagrange_basis(nodes);
  detail::check_positive(w, "gauss_rule");
  return QuadRule1D{NodeFamily::Gauss, k, std::move(nodes), std::move(w), 2 * k + 1};
}

/// +-1 and the k-1 roots of psi_k'; dop 2k-1.
inline QuadRule1D gauss_lobatto_rule(int k) {
  detail::check_rule_degree(k, 1, "gauss_lobatto_rule");
  std::vector<double> x(k + 1, 0.0);
  x[0] = -1.0;
  for (int j = 1; j < (k + 1) / 2; ++j) {
    const double guess = -std::cos(std::numbers::pi * j / k);
    x[j] = detail::newton_root(
        [k](double t) { return std::pair{legendre_derivative(k, t, 1), legendre_derivative(k, t, 2)}; }, guess,
        "gauss_lobatto_rule");
  }
  detail::symmetrize(x);
  NodeSet1D nodes(std::move(x), NodeFamily::GaussLobatto);
  auto w = detail::integrate_lagrange_basis(nodes);
  detail::check_positive(w, "gauss_lobatto_rule");
  return QuadRule1D{NodeFamily::GaussLobatto, k, std::move(nodes), std::move(w), 2 * k - 1};
}

/// Closed Newton-Cotes rule. Throws once weights turn negative (k >= 8).
inline QuadRule1D equispaced_rule(int k) {
  detail::check_rule_degree(k, 1, "equispaced_rule");
  NodeSet1D nodes = equispaced_nodes(k);
  auto w = detail::integrate_lagrange_basis(nodes);
  detail::check_positive(w, "equispaced_rule");
  return QuadRule1D{NodeFamily::Equispaced, k, std::move(nodes), std::move(w), k % 2 == 0 ? k + 1 : k};
}

inline QuadRule1D make_rule(NodeFamily family, int k) {
  switch (family) {
    case NodeFamily::Gauss: return gauss_rule(k);
    case NodeFamily::GaussLobatto: return gauss_lobatto_rule(k);
    case NodeFamily::Equispaced: return equispaced_rule(k);
    default: throw std::invalid_argument("make_rule: no quadrature rule for a custom node family");
  }
}

/// Shared, lazily built rules. Rules are immutable so handing out shared
/// pointers across threads is fine.
inline std::shared_ptr<const QuadRule1D> cached_rule(NodeFamily family, int k) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, std::shared_ptr<const QuadRule1D>> cache;
  const std::pair key{static_cast<int>(family), k};
  {
    std::lock_guard lock(mtx);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto rule = std::make_shared<const QuadRule1D>(make_rule(family, k));
  std::lock_guard lock(mtx);
  return cache.emplace(key, std::move(rule)).first->second;
}

/// Smallest Gauss rule with dop >= m.
inline std::shared_ptr<const QuadRule1D> gauss_rule_with_dop(int m) {
  return cached_rule(NodeFamily::Gauss, std::max(0, m / 2));
}

inline std::shared_ptr<const LagrangeBasis1D> cached_basis(NodeFamily family, int k) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, std::shared_ptr<const LagrangeBasis1D>> cache;
  const std::pair key{static_cast<int>(family), k};
  {
    std::lock_guard lock(mtx);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto basis = family == NodeFamily::Equispaced ? std::make_shared<const LagrangeBasis1D>(equispaced_nodes(k))
                                                : std::make_shared<const LagrangeBasis1D>(make_rule(family, k).nodes);
  std::lock_guard lock(mtx);
  return cache.emplace(key, std::move(basis)).first->second;
}

inline double monomial_moment(int n) { return n % 2 == 1 ? 0.0 : 2.0 / (n + 1); }

namespace detail {
inline bool moment_exact(double q, double exact) { return std::abs(q - exact) <= 1e-10 * std::max(1.0, std::abs(exact)); }
}  // namespace detail

/// Largest m <= 2k+3 such that x^0..x^m are integrated exactly; -1 if none.
inline int degree_of_precision(const QuadRule1D& rule) {
  int dop = -1;
  for (int m = 0; m <= 2 * rule.k + 3; ++m) {
    double q = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) q += rule.weights[i] * std::pow(rule.nodes[i], m);
    if (!detail::moment_exact(q, monomial_moment(m))) break;
    dop = m;
  }
  return dop;
}

struct QuadRuleTensor {
  QuadRule1D axis;
  int dim;
  std::vector<Point> nodes;      // linear_index order, axis 0 fastest
  std::vector<double> weights;   // product weights

  std::size_t size() const { return weights.size(); }
  int points_per_axis() const { return static_cast<int>(axis.size()); }
  MultiIndex index(std::size_t i) const { return multi_index_at(i, points_per_axis(), dim); }
};

inline QuadRuleTensor tensorize(const QuadRule1D& rule, int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("tensorize: dimension must be 1..3");
  QuadRuleTensor t{rule, dim, {}, {}};
  const int n = static_cast<int>(rule.size());
  const std::size_t total = tensor_size(n, dim);
  t.nodes.resize(total);
  t.weights.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    const MultiIndex a = multi_index_at(i, n, dim);
    Point x{};
    double w = 1.0;
    for (int ax = 0; ax < dim; ++ax) {
      x[ax] = rule.nodes[a[ax]];
      w *= rule.weights[a[ax]];
    }
    t.nodes[i] = x;
    t.weights[i] = w;
  }
  return t;
}

/// Tensor version: all x^alpha with ||alpha||_inf <= m.
inline int degree_of_precision(const QuadRuleTensor& rule) {
  const int n = rule.points_per_axis();
  const int mmax = 2 * rule.axis.k + 3;
  std::vector<double> pw(static_cast<std::size_t>(n) * (mmax + 1));
  for (int i = 0; i < n; ++i)
    for (int m = 0; m <= mmax; ++m) pw[i * (mmax + 1) + m] = std::pow(rule.axis.nodes[i], m);

  int dop = -1;
  for (int m = 0; m <= mmax; ++m) {
    bool ok = true;
    // only the new monomials with max entry exactly m need checking
    for_each_multi_index(rule.dim, m, [&](const MultiIndex& alpha) {
      if (!ok || alpha.linf_norm() != m) return;
      double q = 0.0, exact = 1.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const MultiIndex node = rule.index(i);
        double v = rule.weights[i];
        for (int ax = 0; ax < rule.dim; ++ax) v *= pw[node[ax] * (mmax + 1) + alpha[ax]];
        q += v;
      }
      for (int ax = 0; ax < rule.dim; ++ax) exact *= monomial_moment(alpha[ax]);
      ok = detail::moment_exact(q, exact);
    });
    if (!ok) break;
    dop = m;
  }
  return dop;
}

/// Rule pushed forward to an element: x = F_T(xhat), w = |det J| what.
struct MappedRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::vector<Point> ref_nodes;

  std::size_t size() const { return weights.size(); }
  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

inline MappedRule map_rule(const QuadRuleTensor& rule, const AffineMap& map) {
  if (map.dim() != rule.dim) throw std::invalid_argument("map_rule: dimension mismatch");
  MappedRule m;
  m.ref_nodes = rule.nodes;
  m.nodes.reserve(rule.size());
  m.weights.reserve(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    m.nodes.push_back(map(rule.nodes[i]));
    m.weights.push_back(map.abs_det() * rule.weights[i]);
  }
  return m;
}

}  // namespace tpfe
