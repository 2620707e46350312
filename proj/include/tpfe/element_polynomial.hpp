// Members of Q_k(T): nodal values on a tensor Lagrange basis pulled back
// through an affine element map, optionally with Legendre coefficients.
#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tpfe/affine_map.hpp"
#include "tpfe/field.hpp"
#include "tpfe/multi_index.hpp"
#include "tpfe/polybasis.hpp"

namespace tpfe {

using BasisPtr = std::shared_ptr<const LagrangeBasis1D>;

/// Applies op (rows x shape[axis], row-major) along one axis of a tensor stored
/// in linear_index order (axis 0 fastest). shape[axis] becomes rows.
inline std::vector<double> apply_axis(const std::vector<double>& u, std::array<int, kMaxDim>& shape, int dim,
                                      const std::vector<double>& op, int rows, int axis) {
  const int cols = shape[axis];
  std::size_t stride = 1, outer = 1;
  for (int a = 0; a < axis; ++a) stride *= shape[a];
  for (int a = axis + 1; a < dim; ++a) outer *= shape[a];
  std::vector<double> out(stride * rows * outer, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t s = 0; s < stride; ++s)
      for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (int j = 0; j < cols; ++j) acc += op[i * cols + j] * u[(o * cols + j) * stride + s];
        out[(o * rows + i) * stride + s] = acc;
      }
  shape[axis] = rows;
  return out;
}

class ElementPolynomial {
 public:
  ElementPolynomial(AffineMap map, BasisPtr basis, std::vector<double> nodal,
                    std::optional<std::vector<double>> legendre = std::nullopt)
      : map_(std::move(map)), basis_(std::move(basis)), nodal_(std::move(nodal)), legendre_(std::move(legendre)) {
    if (!basis_) throw std::invalid_argument("ElementPolynomial: null basis");
    if (basis_->degree() > kMaxDegree) throw std::invalid_argument("ElementPolynomial: degree exceeds 12");
    if (nodal_.size() != tensor_size(n(), dim())) throw std::invalid_argument("ElementPolynomial: wrong nodal count");
    if (legendre_ && legendre_->size() != nodal_.size())
      throw std::invalid_argument("ElementPolynomial: wrong Legendre coefficient count");
  }

  int dim() const { return map_.dim(); }
  int degree() const { return basis_->degree(); }
  NodeFamily family() const { return basis_->nodes().family(); }
  const AffineMap& map() const { return map_; }
  const BasisPtr& basis() const { return basis_; }
  const std::vector<double>& nodal_values() const { return nodal_; }
  const std::optional<std::vector<double>>& legendre_coefficients() const { return legendre_; }

  double nodal(const MultiIndex& alpha) const { return nodal_[linear_index(alpha, n())]; }

  /// Reference node x_hat_alpha.
  Point ref_node(std::size_t i) const {
    const MultiIndex a = multi_index_at(i, n(), dim());
    Point x{};
    for (int ax = 0; ax < dim(); ++ax) x[ax] = basis_->node(a[ax]);
    return x;
  }
  Point node(std::size_t i) const { return map_(ref_node(i)); }

  /// Value at a reference point.
  double eval_ref(const Point& xhat) const { return contract(nodal_, xhat); }
  double operator()(const Point& x) const { return eval_ref(map_.inverse(x)); }

  /// Nodal values of the reference partial d^beta v_hat.
  std::vector<double> ref_partial_nodal(const MultiIndex& beta) const {
    std::vector<double> u = nodal_, out(nodal_.size());
    for (int ax = 0; ax < dim(); ++ax)
      for (int r = 0; r < beta[ax]; ++r) {
        differentiate_axis(u, out, ax);
        std::swap(u, out);
      }
    return u;
  }

  /// Nodal values of the physical partial d^alpha v, by the chain rule
  /// d/dx_i = sum_j (J^{-1})_{ji} d/dxhat_j.
  std::vector<double> partial_nodal(const MultiIndex& alpha) const {
    if (alpha.size() != dim()) throw std::invalid_argument("partial_nodal: dimension mismatch");
    if (alpha.l1_norm() == 0) return nodal_;
    std::vector<int> dirs;
    for (int i = 0; i < dim(); ++i)
      for (int r = 0; r < alpha[i]; ++r) dirs.push_back(i);

    std::map<MultiIndex, double> terms;
    const auto& jinv = map_.inverse_jacobian();
    if (map_.is_diagonal()) {
      MultiIndex beta = alpha;
      double c = 1.0;
      for (int i = 0; i < dim(); ++i) c *= std::pow(jinv[i][i], alpha[i]);
      terms[beta] = c;
    } else {
      // expand over all sequences (j_1..j_m) of reference directions
      const std::size_t m = dirs.size();
      std::size_t total = 1;
      for (std::size_t s = 0; s < m; ++s) total *= dim();
      for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        MultiIndex beta(dim());
        double coef = 1.0;
        for (std::size_t s = 0; s < m; ++s) {
          const int j = static_cast<int>(c % dim());
          c /= dim();
          coef *= jinv[j][dirs[s]];
          beta[j] += 1;
        }
        if (coef != 0.0) terms[beta] += coef;
      }
    }
    std::vector<double> out(nodal_.size(), 0.0);
    for (const auto& [beta, coef] : terms) {
      const auto u = ref_partial_nodal(beta);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += coef * u[i];
    }
    return out;
  }

  /// Gradient nodal values, one vector per physical direction.
  std::vector<std::vector<double>> gradient_nodal() const {
    std::vector<std::vector<double>> g;
    for (int a = 0; a < dim(); ++a) g.push_back(partial_nodal(MultiIndex::unit(dim(), a)));
    return g;
  }

  /// Same element and basis, other nodal values.
  ElementPolynomial with_nodal(std::vector<double> nodal) const { return ElementPolynomial(map_, basis_, std::move(nodal)); }

  /// Evaluates the interpolant of arbitrary nodal data (same basis) at xhat.
  double contract(const std::vector<double>& u, const Point& xhat) const {
    const int k1 = n();
    std::array<std::array<double, kMaxDegree + 1>, kMaxDim> phi{};
    for (int ax = 0; ax < dim(); ++ax) basis_->values(xhat[ax], std::span<double>(phi[ax].data(), k1));
    if (dim() == 1) {
      double s = 0.0;
      for (int i = 0; i < k1; ++i) s += u[i] * phi[0][i];
      return s;
    }
    if (dim() == 2) {
      double s = 0.0;
      for (int j = 0; j < k1; ++j) {
        double r = 0.0;
        for (int i = 0; i < k1; ++i) r += u[j * k1 + i] * phi[0][i];
        s += r * phi[1][j];
      }
      return s;
    }
    double s = 0.0;
    for (int l = 0; l < k1; ++l) {
      double t = 0.0;
      for (int j = 0; j < k1; ++j) {
        double r = 0.0;
        for (int i = 0; i < k1; ++i) r += u[(l * k1 + j) * k1 + i] * phi[0][i];
        t += r * phi[1][j];
      }
      s += t * phi[2][l];
    }
    return s;
  }

  /// Interpolant of nodal data u on the tensor grid pts^d (reference
  /// coordinates), linear_index order over the grid. Sum-factorized.
  std::vector<double> grid_values(const std::vector<double>& u, const std::vector<double>& pts) const {
    const int k1 = n();
    const int m = static_cast<int>(pts.size());
    std::vector<double> phi(static_cast<std::size_t>(m) * k1);
    for (int i = 0; i < m; ++i) basis_->values(pts[i], std::span<double>(phi.data() + i * k1, k1));
    std::array<int, kMaxDim> shape{k1, k1, k1};
    std::vector<double> out = u;
    for (int ax = 0; ax < dim(); ++ax) out = apply_axis(out, shape, dim(), phi, m, ax);
    return out;
  }

  /// Wraps the polynomial as a ScalarField with exact partials of every order.
  ScalarField as_field() const {
    auto self = std::make_shared<const ElementPolynomial>(*this);
    return ScalarField(
        dim(), [self](const Point& x) { return (*self)(x); },
        [self](const MultiIndex& alpha) -> PointFn {
          auto u = std::make_shared<const std::vector<double>>(self->partial_nodal(alpha));
          return [self, u](const Point& x) { return self->contract(*u, self->map().inverse(x)); };
        },
        fields::kAnalytic, "Q" + std::to_string(degree()));
  }

 private:
  int n() const { return static_cast<int>(basis_->size()); }

  void differentiate_axis(const std::vector<double>& u, std::vector<double>& out, int axis) const {
    const int k1 = n();
    std::size_t stride = 1;
    for (int a = 0; a < axis; ++a) stride *= k1;
    const std::size_t block = stride * k1;
    std::vector<double> line(k1), dline(k1);
    for (std::size_t base = 0; base < u.size(); base += block)
      for (std::size_t s = 0; s < stride; ++s) {
        for (int j = 0; j < k1; ++j) line[j] = u[base + s + j * stride];
        basis_->differentiate_nodal(line, dline);
        for (int j = 0; j < k1; ++j) out[base + s + j * stride] = dline[j];
      }
  }

  AffineMap map_;
  BasisPtr basis_;
  std::vector<double> nodal_;
  std::optional<std::vector<double>> legendre_;
};

}  // namespace tpfe
