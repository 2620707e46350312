// L^p norms, integer-order Sobolev seminorms, face norms, discrete norms and
// mass-matrix spectral extremes.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tpfe/element_polynomial.hpp"
#include "tpfe/field.hpp"
#include "tpfe/geometry.hpp"
#include "tpfe/linalg.hpp"
#include "tpfe/quadrature.hpp"

namespace tpfe {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// p in {1, 2, 4, 6, inf}.
inline void check_p(double p) {
  if (!(p == 1.0 || p == 2.0 || p == 4.0 || p == 6.0 || std::isinf(p)))
    throw std::invalid_argument("norm exponent p must be one of 1, 2, 4, 6, inf (got " + std::to_string(p) + ")");
}

inline double parse_p(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "oo") return kInf;
  const double p = std::stod(s);
  check_p(p);
  return p;
}

struct NormOptions {
  int dop = 24;           // Gauss degree of precision used for finite p
  int sup_samples = 64;   // per-axis linspace points for p = inf
};

/// Options for errors of degree-k approximations: dop >= max(2k+20, p k).
inline NormOptions norm_options_for(int k, double p) {
  NormOptions o;
  o.dop = 2 * k + 20;
  if (!std::isinf(p)) o.dop = std::max(o.dop, static_cast<int>(std::ceil(p * k)) + 1);
  return o;
}

namespace detail {

inline double pow_abs(double v, double p) {
  const double a = std::abs(v);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

/// Per-axis sample coordinates: linspace(-1,1,n) plus the Gauss nodes.
inline std::vector<double> sup_axis_points(int n, int dop) {
  std::vector<double> x;
  for (int i = 0; i < n; ++i) x.push_back(-1.0 + 2.0 * i / (n - 1));
  const auto g = gauss_rule_with_dop(dop);
  for (std::size_t i = 0; i < g->size(); ++i) x.push_back(g->nodes[i]);
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  return x;
}

/// Gauss nodes and weights on [-1,1] for finite p. For p = 1 the integrand
/// |v| has kinks where v changes sign, so the rule is split into panels.
inline constexpr int kL1Panels = 4;

inline std::pair<std::vector<double>, std::vector<double>> lp_axis_rule(double p, int dop) {
  const auto g = gauss_rule_with_dop(dop);
  if (p != 1.0) return {g->nodes.values(), g->weights};
  std::vector<double> x, w;
  const double half = 1.0 / kL1Panels;
  for (int j = 0; j < kL1Panels; ++j) {
    const double c = -1.0 + (2 * j + 1) * half;
    for (std::size_t q = 0; q < g->size(); ++q) {
      x.push_back(c + half * g->nodes[q]);
      w.push_back(half * g->weights[q]);
    }
  }
  return {x, w};
}

}  // namespace detail

/// max |f| over a tensor sample grid of T; a lower bound on the true sup.
template <class F>
double sup_sample(const F& f, const AffineMap& map, int n = 64, int dop = 24) {
  const auto x = detail::sup_axis_points(n, dop);
  const int m = static_cast<int>(x.size());
  const std::size_t total = tensor_size(m, map.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    const MultiIndex a = multi_index_at(i, m, map.dim());
    Point xhat{};
    for (int ax = 0; ax < map.dim(); ++ax) xhat[ax] = x[a[ax]];
    s = std::max(s, std::abs(f(map(xhat))));
  }
  return s;
}

/// |sup on 2n grid - sup on n grid|; small values indicate saturation.
template <class F>
double sup_saturation(const F& f, const AffineMap& map, int n = 64) {
  return std::abs(sup_sample(f, map, 2 * n) - sup_sample(f, map, n));
}

/// ||f||_{0,p,T}.
template <class F>
double lp_norm(const F& f, const AffineMap& map, double p, NormOptions opt = {}) {
  check_p(p);
  if (std::isinf(p)) return sup_sample(f, map, opt.sup_samples, opt.dop);
  const auto [x, wt] = detail::lp_axis_rule(p, opt.dop);
  const int nq = static_cast<int>(x.size());
  const std::size_t total = tensor_size(nq, map.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    const MultiIndex a = multi_index_at(i, nq, map.dim());
    Point xhat{};
    double w = map.abs_det();
    for (int ax = 0; ax < map.dim(); ++ax) {
      xhat[ax] = x[a[ax]];
      w *= wt[a[ax]];
    }
    s += w * detail::pow_abs(f(map(xhat)), p);
  }
  return std::pow(s, 1.0 / p);
}

namespace detail {

/// Reference points per axis and (for finite p) weights used by the
/// polynomial overloads: Gauss nodes for finite p, the sup grid for p = inf.
struct AxisSamples {
  std::vector<double> x, w;
};

inline AxisSamples axis_samples(double p, const NormOptions& opt) {
  AxisSamples s;
  if (std::isinf(p)) {
    s.x = sup_axis_points(opt.sup_samples, opt.dop);
    return s;
  }
  std::tie(s.x, s.w) = lp_axis_rule(p, opt.dop);
  return s;
}

/// Combines values on the tensor sample grid into ||.||_{0,p,T}.
inline double reduce_grid(const std::vector<double>& vals, const AxisSamples& s, int dim, double det, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : vals) m = std::max(m, std::abs(v));
    return m;
  }
  const int n = static_cast<int>(s.x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const MultiIndex a = multi_index_at(i, n, dim);
    double w = det;
    for (int ax = 0; ax < dim; ++ax) w *= s.w[a[ax]];
    acc += w * pow_abs(vals[i], p);
  }
  return std::pow(acc, 1.0 / p);
}

/// Values of g at F_T of the tensor sample grid.
template <class G>
std::vector<double> sample_field(const G& g, const AffineMap& map, const AxisSamples& s) {
  const int n = static_cast<int>(s.x.size());
  std::vector<double> out(tensor_size(n, map.dim()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const MultiIndex a = multi_index_at(i, n, map.dim());
    Point xhat{};
    for (int ax = 0; ax < map.dim(); ++ax) xhat[ax] = s.x[a[ax]];
    out[i] = g(map(xhat));
  }
  return out;
}

inline double combine_seminorm(double acc, double v, double p) { return std::isinf(p) ? std::max(acc, v) : acc + std::pow(v, p); }
inline double finish_seminorm(double acc, double p) { return std::isinf(p) ? acc : std::pow(acc, 1.0 / p); }

}  // namespace detail

/// ||v||_{0,p,T} for v in Q_k(T), evaluated by sum factorization.
inline double lp_norm(const ElementPolynomial& v, double p, NormOptions opt = {}) {
  check_p(p);
  const auto s = detail::axis_samples(p, opt);
  return detail::reduce_grid(v.grid_values(v.nodal_values(), s.x), s, v.dim(), v.map().abs_det(), p);
}

/// |v|_{l,p,T} for v in Q_k(T).
inline double sobolev_seminorm(const ElementPolynomial& v, int l, double p, NormOptions opt = {}) {
  check_p(p);
  const auto s = detail::axis_samples(p, opt);
  double acc = 0.0;
  for (const auto& alpha : multi_indices_of_order(v.dim(), l)) {
    const auto vals = v.grid_values(v.partial_nodal(alpha), s.x);
    acc = detail::combine_seminorm(acc, detail::reduce_grid(vals, s, v.dim(), v.map().abs_det(), p), p);
  }
  return detail::finish_seminorm(acc, p);
}

inline double sobolev_norm(const ElementPolynomial& v, int l, double p, NormOptions opt = {}) {
  double acc = 0.0;
  for (int j = 0; j <= l; ++j) acc = detail::combine_seminorm(acc, sobolev_seminorm(v, j, p, opt), p);
  return detail::finish_seminorm(acc, p);
}

/// |f - v|_{r,p,T} for a field f and v in Q_k(T) on the same element.
inline double error_seminorm(const ScalarField& f, const ElementPolynomial& v, int r, double p, NormOptions opt = {}) {
  check_p(p);
  const auto s = detail::axis_samples(p, opt);
  double acc = 0.0;
  for (const auto& alpha : multi_indices_of_order(v.dim(), r)) {
    auto vals = detail::sample_field(f.partial(alpha), v.map(), s);
    const auto pv = v.grid_values(v.partial_nodal(alpha), s.x);
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] -= pv[i];
    acc = detail::combine_seminorm(acc, detail::reduce_grid(vals, s, v.dim(), v.map().abs_det(), p), p);
  }
  return detail::finish_seminorm(acc, p);
}

/// |f|_{l,p,T}: l^p combination over |alpha| = l of ||d^alpha f||_{0,p,T};
/// max over alpha for p = inf.
inline double sobolev_seminorm(const ScalarField& f, const AffineMap& map, int l, double p, NormOptions opt = {}) {
  check_p(p);
  if (l < 0) throw std::invalid_argument("sobolev_seminorm: negative order");
  double acc = 0.0;
  for (const auto& alpha : multi_indices_of_order(map.dim(), l)) {
    const double v = lp_norm(f.partial(alpha), map, p, opt);
    acc = std::isinf(p) ? std::max(acc, v) : acc + std::pow(v, p);
  }
  return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

/// ||f||_{l,p,T} = (sum_{j <= l} |f|_{j,p,T}^p)^{1/p}, max for p = inf.
inline double sobolev_norm(const ScalarField& f, const AffineMap& map, int l, double p, NormOptions opt = {}) {
  double acc = 0.0;
  for (int j = 0; j <= l; ++j) {
    const double v = sobolev_seminorm(f, map, j, p, opt);
    acc = std::isinf(p) ? std::max(acc, v) : acc + std::pow(v, p);
  }
  return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

/// |f|_{r,p,E} with tangential derivatives. In 1D a face is a point: r = 0
/// gives |f(x)|, r >= 1 gives 0.
inline double face_norm(const ScalarField& f, const Face& face, int r, double p, NormOptions opt = {}) {
  check_p(p);
  if (r < 0) throw std::invalid_argument("face_norm: negative order");
  const int d = face.dim();
  if (d == 1) {
    if (r > 0) return 0.0;
    const Point x = face.map(Point{face.side == 0 ? -1.0 : 1.0, 0.0, 0.0});
    return std::abs(f(x));
  }
  if (r > 0 && !face.axis_aligned())
    throw std::invalid_argument("face_norm: tangential derivatives only on axis-aligned faces");

  std::vector<MultiIndex> alphas;
  for (const auto& a : multi_indices_of_order(d, r))
    if (a[face.axis] == 0) alphas.push_back(a);

  if (std::isinf(p)) {
    const auto x = detail::sup_axis_points(opt.sup_samples, opt.dop);
    const auto free = face.free_axes();
    const int m = static_cast<int>(x.size());
    double s = 0.0;
    for (const auto& alpha : alphas) {
      const PointFn g = f.partial(alpha);
      for (std::size_t i = 0; i < tensor_size(m, d - 1); ++i) {
        const MultiIndex a = multi_index_at(i, m, d - 1);
        Point xhat{};
        xhat[face.axis] = face.side == 0 ? -1.0 : 1.0;
        for (int j = 0; j < d - 1; ++j) xhat[free[j]] = x[a[j]];
        s = std::max(s, std::abs(g(face.map(xhat))));
      }
    }
    return s;
  }
  const FaceRule fr = face_rule(face, *gauss_rule_with_dop(opt.dop));
  double acc = 0.0;
  for (const auto& alpha : alphas) {
    const PointFn g = f.partial(alpha);
    for (std::size_t q = 0; q < fr.size(); ++q) acc += fr.weights[q] * detail::pow_abs(g(fr.nodes[q]), p);
  }
  return std::pow(acc, 1.0 / p);
}

/// (sum_alpha w_alpha |v(x_alpha)|^p)^{1/p}; finite p only.
template <class F>
double discrete_lp_norm(const F& v, const MappedRule& rule, double p) {
  check_p(p);
  if (std::isinf(p)) throw std::invalid_argument("discrete_lp_norm: p = inf not supported, use lp_norm");
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * detail::pow_abs(v(rule.nodes[i]), p);
  return std::pow(s, 1.0 / p);
}

/// Same from nodal values already at the rule nodes.
inline double discrete_lp_norm(const std::vector<double>& values, const MappedRule& rule, double p) {
  check_p(p);
  if (std::isinf(p)) throw std::invalid_argument("discrete_lp_norm: p = inf not supported, use lp_norm");
  if (values.size() != rule.size()) throw std::invalid_argument("discrete_lp_norm: value/rule size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * detail::pow_abs(values[i], p);
  return std::pow(s, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Mass matrices

/// M_ij = integral of phi_i phi_j over [-1,1].
inline Matrix lagrange_mass_matrix_1d(const LagrangeBasis1D& basis) {
  const std::size_t n = basis.size();
  const auto g = cached_rule(NodeFamily::Gauss, static_cast<int>(n));
  Matrix m(n, n);
  std::vector<double> v(n);
  for (std::size_t q = 0; q < g->size(); ++q) {
    basis.values(g->nodes[q], v);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) += g->weights[q] * v[i] * v[j];
  }
  return m;
}

/// M_ij = integral of psi_i psi_j over [-1,1] (i, j <= k).
inline Matrix legendre_mass_matrix_1d(int k) {
  const auto g = cached_rule(NodeFamily::Gauss, k + 1);
  Matrix m(k + 1, k + 1);
  for (std::size_t q = 0; q < g->size(); ++q)
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j)
        m(i, j) += g->weights[q] * legendre_eval(i, g->nodes[q]) * legendre_eval(j, g->nodes[q]);
  return m;
}

inline Matrix tensor_mass_matrix(const Matrix& m1, int dim) {
  Matrix m = m1;
  for (int a = 1; a < dim; ++a) m = kronecker(m1, m);
  return m;
}

struct MassExtremes {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int sweeps = 0;
  double off_diagonal = 0.0;
};

inline MassExtremes mass_matrix_extremes(const Matrix& m) {
  if (m.rows() > 729) throw std::invalid_argument("mass_matrix_extremes: matrix larger than (8+1)^3");
  if (m.max_asymmetry() > 1e-12) throw std::invalid_argument("mass_matrix_extremes: matrix not symmetric");
  const auto e = symmetric_eigenvalues(m, 1e-12, 200);
  if (!(e.eigenvalues.front() > 0.0)) throw std::runtime_error("mass_matrix_extremes: matrix not positive definite");
  return MassExtremes{e.eigenvalues.front(), e.eigenvalues.back(), e.sweeps, e.off_diagonal};
}

inline void check_mass_size(int k, int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("mass matrix: dimension must be 1..3");
  if (k < 0 || k > kMaxDegree || (dim == 3 && k > 8))
    throw std::invalid_argument("mass matrix: size cap exceeded (k <= 8 for d = 3)");
}

/// Extremes of the reference Lagrange mass matrix for a node family.
inline MassExtremes lagrange_mass_extremes(NodeFamily family, int k, int dim) {
  check_mass_size(k, dim);
  return mass_matrix_extremes(tensor_mass_matrix(lagrange_mass_matrix_1d(*cached_basis(family, k)), dim));
}

/// Extremes of the reference Legendre mass matrix.
inline MassExtremes legendre_mass_extremes(int k, int dim) {
  check_mass_size(k, dim);
  return mass_matrix_extremes(tensor_mass_matrix(legendre_mass_matrix_1d(k), dim));
}

}  // namespace tpfe
