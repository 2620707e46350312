// Approximation operators on a single element: Lagrange interpolation,
// continuous and discrete L2 projection, lumping, the embedded hierarchical
// projector, the fluctuation operator and the commutation error.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "tpfe/element_polynomial.hpp"
#include "tpfe/field.hpp"
#include "tpfe/linalg.hpp"
#include "tpfe/quadrature.hpp"

namespace tpfe {

// ---------------------------------------------------------------------------
// Interpolation

template <class F>
ElementPolynomial interpolate(const F& f, const AffineMap& map, BasisPtr basis) {
  const int n = static_cast<int>(basis->size());
  const std::size_t total = tensor_size(n, map.dim());
  std::vector<double> u(total);
  for (std::size_t i = 0; i < total; ++i) {
    const MultiIndex a = multi_index_at(i, n, map.dim());
    Point xhat{};
    for (int ax = 0; ax < map.dim(); ++ax) xhat[ax] = basis->node(a[ax]);
    u[i] = f(map(xhat));
  }
  return ElementPolynomial(map, std::move(basis), std::move(u));
}

template <class F>
ElementPolynomial interpolate(const F& f, const AffineMap& map, NodeFamily family, int k) {
  return interpolate(f, map, cached_basis(family, k));
}

// ---------------------------------------------------------------------------
// L2 projection through the Legendre expansion

/// integral of psi_n^2 over [-1,1], measured with a Gauss rule exact for degree 2n.
inline double legendre_norm_squared(int n) {
  const auto rule = cached_rule(NodeFamily::Gauss, n);
  double s = 0.0;
  for (std::size_t q = 0; q < rule->size(); ++q) {
    const double v = legendre_eval(n, rule->nodes[q]);
    s += rule->weights[q] * v * v;
  }
  return s;
}

/// Nodal values on basis of sum_beta c_beta psi_beta.
inline std::vector<double> legendre_to_nodal(const std::vector<double>& coeffs, int k, int dim,
                                             const LagrangeBasis1D& basis) {
  const int n = static_cast<int>(basis.size());
  std::vector<double> v(static_cast<std::size_t>(n) * (k + 1));
  for (int i = 0; i < n; ++i)
    for (int m = 0; m <= k; ++m) v[i * (k + 1) + m] = legendre_eval(m, basis.node(i));
  std::array<int, kMaxDim> shape{k + 1, k + 1, k + 1};
  std::vector<double> u = coeffs;
  for (int ax = 0; ax < dim; ++ax) u = apply_axis(u, shape, dim, v, n, ax);
  return u;
}

inline constexpr int kOversample = 20;

/// P_h^k f: c_alpha = (f, psi_alpha)_T / (|det J| prod rho_{alpha_i}) with an
/// oversampled Gauss rule (dop >= 2k + margin). Nodal values on `basis`.
template <class F>
ElementPolynomial l2_project(const F& f, const AffineMap& map, int k, BasisPtr basis, int margin = kOversample) {
  if (basis->degree() != k) throw std::invalid_argument("l2_project: basis degree differs from k");
  const int d = map.dim();
  const auto rule = gauss_rule_with_dop(2 * k + margin);
  const int nq = static_cast<int>(rule->size());

  std::vector<double> fv(tensor_size(nq, d));
  for (std::size_t i = 0; i < fv.size(); ++i) {
    const MultiIndex a = multi_index_at(i, nq, d);
    Point xhat{};
    for (int ax = 0; ax < d; ++ax) xhat[ax] = rule->nodes[a[ax]];
    fv[i] = f(map(xhat));
  }
  std::vector<double> op(static_cast<std::size_t>(k + 1) * nq);
  for (int m = 0; m <= k; ++m) {
    const double rho = legendre_norm_squared(m);
    for (int q = 0; q < nq; ++q) op[m * nq + q] = rule->weights[q] * legendre_eval(m, rule->nodes[q]) / rho;
  }
  std::array<int, kMaxDim> shape{nq, nq, nq};
  std::vector<double> c = fv;
  for (int ax = 0; ax < d; ++ax) c = apply_axis(c, shape, d, op, k + 1, ax);

  auto nodal = legendre_to_nodal(c, k, d, *basis);
  return ElementPolynomial(map, std::move(basis), std::move(nodal), std::move(c));
}

template <class F>
ElementPolynomial l2_project(const F& f, const AffineMap& map, int k, NodeFamily family = NodeFamily::GaussLobatto) {
  // Q_0 has a single node; only the Gauss family provides it
  if (k == 0) family = NodeFamily::Gauss;
  return l2_project(f, map, k, cached_basis(family, k));
}

// ---------------------------------------------------------------------------
// Discrete inner product and discrete L2 projection

template <class U, class V>
double discrete_inner_product(const U& u, const V& v, const MappedRule& rule) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * u(rule.nodes[i]) * v(rule.nodes[i]);
  return s;
}

/// Projection w.r.t. (.,.)_{0,T,h} onto Q_k with the Lagrange basis on the
/// rule's own nodes. Solves the (Kronecker) discrete mass system; it does not
/// assume the mass matrix is diagonal.
template <class F>
ElementPolynomial discrete_l2_project(const F& f, const AffineMap& map, const QuadRule1D& rule, BasisPtr basis) {
  const int n = static_cast<int>(basis->size());
  if (static_cast<int>(rule.size()) != n) throw std::invalid_argument("discrete_l2_project: node/quadrature mismatch");
  for (int i = 0; i < n; ++i)
    if (std::abs(rule.nodes[i] - basis->node(i)) > 1e-14)
      throw std::invalid_argument("discrete_l2_project: node/quadrature mismatch");
  const int d = map.dim();
  const int nq = n;

  // phi(q, i) = phi_i(x_q); 1D mass M(i, j) = sum_q w_q phi_i phi_j
  std::vector<double> phiw(static_cast<std::size_t>(n) * nq);  // (i, q): w_q phi_i(x_q)
  Matrix m1(n, n);
  std::vector<double> vals(n);
  for (int q = 0; q < nq; ++q) {
    basis->values(rule.nodes[q], vals);
    for (int i = 0; i < n; ++i) {
      phiw[i * nq + q] = rule.weights[q] * vals[i];
      for (int j = 0; j < n; ++j) m1(i, j) += rule.weights[q] * vals[i] * vals[j];
    }
  }
  std::vector<double> b(tensor_size(nq, d));
  for (std::size_t i = 0; i < b.size(); ++i) {
    const MultiIndex a = multi_index_at(i, nq, d);
    Point xhat{};
    for (int ax = 0; ax < d; ++ax) xhat[ax] = rule.nodes[a[ax]];
    b[i] = f(map(xhat));
  }
  std::array<int, kMaxDim> shape{nq, nq, nq};
  for (int ax = 0; ax < d; ++ax) b = apply_axis(b, shape, d, phiw, n, ax);

  // (M x M x M) c = b, one axis at a time
  const Matrix l = cholesky(m1);
  std::vector<double> minv(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    cholesky_solve(l, e);
    for (int i = 0; i < n; ++i) minv[i * n + j] = e[i];
  }
  for (int ax = 0; ax < d; ++ax) b = apply_axis(b, shape, d, minv, n, ax);
  return ElementPolynomial(map, std::move(basis), std::move(b));
}

// ---------------------------------------------------------------------------
// Control volumes and lumping

/// Cells Omega_alpha: reference breakpoints -1 + cumulative weights, mapped by F_T.
class ControlVolumes {
 public:
  ControlVolumes(const QuadRule1D& rule, const AffineMap& map) : map_(map), dim_(map.dim()) {
    breaks_.push_back(-1.0);
    for (double w : rule.weights) breaks_.push_back(breaks_.back() + w);
    breaks_.back() = 1.0;
  }

  int dim() const { return dim_; }
  int cells_per_axis() const { return static_cast<int>(breaks_.size()) - 1; }
  std::size_t size() const { return tensor_size(cells_per_axis(), dim_); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const AffineMap& map() const { return map_; }

  double measure(std::size_t i) const {
    const MultiIndex a = multi_index_at(i, cells_per_axis(), dim_);
    double m = map_.abs_det();
    for (int ax = 0; ax < dim_; ++ax) m *= breaks_[a[ax] + 1] - breaks_[a[ax]];
    return m;
  }

  double total_measure() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += measure(i);
    return s;
  }

  /// Reference box of cell i.
  std::pair<Point, Point> ref_box(std::size_t i) const {
    const MultiIndex a = multi_index_at(i, cells_per_axis(), dim_);
    Point lo{}, hi{};
    for (int ax = 0; ax < dim_; ++ax) {
      lo[ax] = breaks_[a[ax]];
      hi[ax] = breaks_[a[ax] + 1];
    }
    return {lo, hi};
  }

  /// Cell containing the physical point x.
  std::size_t locate(const Point& x) const {
    const Point xhat = map_.inverse(x);
    MultiIndex a(dim_);
    for (int ax = 0; ax < dim_; ++ax) {
      const auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, xhat[ax]);
      a[ax] = static_cast<int>(it - (breaks_.begin() + 1));
    }
    return linear_index(a, cells_per_axis());
  }

 private:
  AffineMap map_;
  int dim_;
  std::vector<double> breaks_;
};

/// L_h v = sum_alpha v(x_alpha) chi_{Omega_alpha}.
class LumpedField {
 public:
  LumpedField(ControlVolumes cv, std::vector<double> values) : cv_(std::move(cv)), values_(std::move(values)) {}

  const ControlVolumes& volumes() const { return cv_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(const Point& x) const { return values_[cv_.locate(x)]; }

 private:
  ControlVolumes cv_;
  std::vector<double> values_;
};

template <class F>
LumpedField lump(const F& v, const QuadRule1D& rule, const AffineMap& map) {
  const QuadRuleTensor t = tensorize(rule, map.dim());
  std::vector<double> vals(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) vals[i] = v(map(t.nodes[i]));
  return LumpedField(ControlVolumes(rule, map), std::move(vals));
}

/// ||L_h v||_{0,p,T} by integrating over each control volume with a small
/// Gauss rule and locating every sample point; p = inf gives the max.
inline double lumped_lp_norm(const LumpedField& l, double p) {
  const auto& cv = l.volumes();
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : l.values()) m = std::max(m, std::abs(v));
    return m;
  }
  const auto g = cached_rule(NodeFamily::Gauss, 1);
  const QuadRuleTensor t = tensorize(*g, cv.dim());
  double s = 0.0;
  for (std::size_t c = 0; c < cv.size(); ++c) {
    const auto [lo, hi] = cv.ref_box(c);
    double scale = cv.map().abs_det();
    for (int ax = 0; ax < cv.dim(); ++ax) scale *= 0.5 * (hi[ax] - lo[ax]);
    for (std::size_t q = 0; q < t.size(); ++q) {
      Point xhat{};
      for (int ax = 0; ax < cv.dim(); ++ax) xhat[ax] = 0.5 * (lo[ax] + hi[ax]) + 0.5 * (hi[ax] - lo[ax]) * t.nodes[q][ax];
      s += scale * t.weights[q] * std::pow(std::abs(l(cv.map()(xhat))), p);
    }
  }
  return std::pow(s, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Embedded hierarchical projector P_h^{K,k} (Gauss-Lobatto nodes)

inline bool valid_embedded_pair(int K, int k) {
  return k <= kMaxDegree && ((K == 1 && k >= 1) || (K == 2 && k >= 2 && k % 2 == 0));
}

/// 1D indices of the degree-K GL nodes inside the degree-k GL nodes.
inline std::vector<int> embedded_subset(int K, int k) {
  if (!valid_embedded_pair(K, k))
    throw std::invalid_argument("embedded pair (K=" + std::to_string(K) + ", k=" + std::to_string(k) +
                                ") is not a Gauss-Lobatto embedding");
  if (K == 1) return {0, k};
  return {0, k / 2, k};
}

/// Linear indices of the tensorized subset.
inline std::vector<std::size_t> embedded_subset_indices(int K, int k, int dim) {
  const auto sub = embedded_subset(K, k);
  const int ns = static_cast<int>(sub.size());
  std::vector<std::size_t> out;
  for_each_multi_index(dim, ns - 1, [&](const MultiIndex& s) {
    MultiIndex a(dim);
    for (int ax = 0; ax < dim; ++ax) a[ax] = sub[s[ax]];
    out.push_back(linear_index(a, k + 1));
  });
  return out;
}

/// Nodal coefficients (on the degree-k GL basis) of P_h^{K,k} applied to data
/// given by its GL nodal values. Solves the discrete normal equations on the
/// subset span.
inline std::vector<double> embedded_project_nodal(const std::vector<double>& u, int dim, int K, int k) {
  const auto idx = embedded_subset_indices(K, k, dim);
  const auto rule = cached_rule(NodeFamily::GaussLobatto, k);
  const auto basis = cached_basis(NodeFamily::GaussLobatto, k);
  const QuadRuleTensor t = tensorize(*rule, dim);
  const std::size_t ns = idx.size();
  if (u.size() != t.size()) throw std::invalid_argument("embedded_project_nodal: wrong value count");

  // phi_s at every quadrature node, s in the subset
  std::vector<double> phi(ns * t.size());
  std::array<std::vector<double>, kMaxDim> v1;
  for (std::size_t q = 0; q < t.size(); ++q) {
    for (int ax = 0; ax < dim; ++ax) v1[ax] = basis->values(t.nodes[q][ax]);
    for (std::size_t s = 0; s < ns; ++s) {
      const MultiIndex a = multi_index_at(idx[s], k + 1, dim);
      double v = 1.0;
      for (int ax = 0; ax < dim; ++ax) v *= v1[ax][a[ax]];
      phi[s * t.size() + q] = v;
    }
  }
  Matrix g(ns, ns);
  std::vector<double> b(ns, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t q = 0; q < t.size(); ++q) b[s] += t.weights[q] * u[q] * phi[s * t.size() + q];
    for (std::size_t r = 0; r < ns; ++r) {
      double acc = 0.0;
      for (std::size_t q = 0; q < t.size(); ++q) acc += t.weights[q] * phi[s * t.size() + q] * phi[r * t.size() + q];
      g(s, r) = acc;
    }
  }
  cholesky_solve(cholesky(g), b);
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t s = 0; s < ns; ++s) out[idx[s]] = b[s];
  return out;
}

template <class F>
ElementPolynomial embedded_project(const F& f, const AffineMap& map, int K, int k) {
  const auto basis = cached_basis(NodeFamily::GaussLobatto, k);
  embedded_subset(K, k);  // validates the pair
  const auto iv = interpolate(f, map, basis);
  return iv.with_nodal(embedded_project_nodal(iv.nodal_values(), map.dim(), K, k));
}

/// P_h' = Id - P_h^{K,k} on GL nodal data.
inline std::vector<double> fluctuation_nodal(const std::vector<double>& u, int dim, int K, int k) {
  const auto p = embedded_project_nodal(u, dim, K, k);
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - p[i];
  return out;
}

/// f - P_h^{K,k} f as a field on T.
inline ScalarField fluctuation(const ScalarField& f, const AffineMap& map, int K, int k) {
  const auto p = embedded_project(f, map, K, k);
  const auto pf = std::make_shared<const ElementPolynomial>(p);
  return ScalarField(f.dim(), [f, pf](const Point& x) { return f(x) - (*pf)(x); }, "fluctuation");
}

/// (P'(grad v), P'(grad v^{2m-1}))_{0,T,h} and the same form with P_h^{K,k}.
/// v^{2m-1} is formed at the nodes: grad v^{2m-1} = (2m-1) v^{2m-2} grad v.
struct SignForms {
  double fluctuation = 0.0;
  double projection = 0.0;
};

inline SignForms fluctuation_sign_forms(const ElementPolynomial& v, int K, int m) {
  if (v.family() != NodeFamily::GaussLobatto) throw std::invalid_argument("fluctuation_sign_forms: GL basis required");
  const int k = v.degree();
  const int d = v.dim();
  const auto rule = cached_rule(NodeFamily::GaussLobatto, k);
  const MappedRule mr = map_rule(tensorize(*rule, d), v.map());
  const auto& u = v.nodal_values();
  SignForms out;
  for (int c = 0; c < d; ++c) {
    const auto g = v.partial_nodal(MultiIndex::unit(d, c));
    std::vector<double> h(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) h[i] = (2 * m - 1) * std::pow(u[i], 2 * m - 2) * g[i];
    const auto pg = embedded_project_nodal(g, d, K, k), ph = embedded_project_nodal(h, d, K, k);
    for (std::size_t i = 0; i < g.size(); ++i) {
      out.fluctuation += mr.weights[i] * (g[i] - pg[i]) * (h[i] - ph[i]);
      out.projection += mr.weights[i] * pg[i] * ph[i];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commutation error ||I_GL(grad v) - grad I_GL v||_{0,2,T,GL}

inline double commutation_error(const ScalarField& f, const AffineMap& map, int k) {
  const int d = map.dim();
  const auto basis = cached_basis(NodeFamily::GaussLobatto, k);
  const auto rule = cached_rule(NodeFamily::GaussLobatto, k);
  const MappedRule mr = map_rule(tensorize(*rule, d), map);
  const auto iv = interpolate(f, map, basis);
  double s = 0.0;
  for (int c = 0; c < d; ++c) {
    const auto e = MultiIndex::unit(d, c);
    const PointFn df = f.partial(e);
    const auto div = iv.partial_nodal(e);
    for (std::size_t i = 0; i < mr.size(); ++i) {
      const double diff = df(mr.nodes[i]) - div[i];
      s += mr.weights[i] * diff * diff;
    }
  }
  return std::sqrt(s);
}

/// sum_alpha phi_alpha(xhat)^2 for the GL basis of degree k.
inline double lagrange_square_sum(const Point& xhat, int k, int dim, NodeFamily family = NodeFamily::GaussLobatto) {
  if (family != NodeFamily::GaussLobatto)
    throw std::invalid_argument("lagrange_square_sum: bound only holds for Gauss-Lobatto nodes");
  const auto basis = cached_basis(family, k);
  double prod = 1.0;
  std::vector<double> v(basis->size());
  for (int ax = 0; ax < dim; ++ax) {
    basis->values(xhat[ax], v);
    double s = 0.0;
    for (double x : v) s += x * x;
    prod *= s;
  }
  return prod;
}

}  // namespace tpfe
