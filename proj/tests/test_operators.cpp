#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "tpfe/norms.hpp"
#include "tpfe/operators.hpp"

using namespace tpfe;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double pi = std::numbers::pi;

// monomial coefficients of the interpolant through (x_i, y_i), by Gaussian elimination
std::vector<double> vandermonde_fit(const std::vector<double>& x, std::vector<double> y) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m < n; ++m) a[i][m] = std::pow(x[i], double(m));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(y[c], y[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      y[r] -= f * y[c];
    }
  }
  std::vector<double> c(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * c[j];
    c[i] = s / a[i][i];
  }
  return c;
}

double poly_eval(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t m = c.size(); m-- > 0;) s = s * x + c[m];
  return s;
}

double poly_deriv(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t m = c.size(); m-- > 1;) s = s * x + m * c[m];
  return s;
}

ScalarField sin1d() { return fields::sin_sum(1); }

AffineMap random_box(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1), w(0.2, 0.8);
  Point lo{}, hi{};
  for (int a = 0; a < d; ++a) {
    lo[a] = u(rng);
    hi[a] = lo[a] + w(rng);
  }
  return AffineMap::box(d, lo, hi);
}

}  // namespace

TEST_CASE("interpolation") {
  const auto ref = AffineMap::identity(1);
  const auto c = interpolate(fields::constant(1, 2.5), ref, NodeFamily::GaussLobatto, 3);
  for (double v : c.nodal_values()) CHECK(v == 2.5);

  MultiIndex e2(1);
  e2[0] = 2;
  const auto sq = interpolate(fields::monomial(e2), ref, NodeFamily::GaussLobatto, 2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int s = 0; s < 100; ++s) {
    const double x = u(rng);
    CHECK_THAT(sq(Point{x, 0, 0}), WithinAbs(x * x, 1e-14));
  }

  const auto basis = cached_basis(NodeFamily::GaussLobatto, 4);
  const auto iv = interpolate(sin1d(), ref, basis);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < basis->size(); ++i) {
    xs.push_back(basis->node(i));
    ys.push_back(std::sin(pi * basis->node(i)));
  }
  const auto coef = vandermonde_fit(xs, ys);
  CHECK_THAT(iv(Point{0.3, 0, 0}), WithinAbs(poly_eval(coef, 0.3), 1e-10));
}

TEST_CASE("L2 projection") {
  const auto ref = AffineMap::identity(1);
  const auto p0 = l2_project(fields::monomial(MultiIndex::unit(1, 0)), ref, 0);
  CHECK_THAT(p0(Point{0.4, 0, 0}), WithinAbs(0.0, 1e-14));

  std::mt19937_64 rng(5);
  for (int d = 1; d <= 3; ++d)
    for (int k = 1; k <= 4; ++k) {
      const auto map = random_box(d, rng);
      const auto f = fields::random_polynomial(d, k, rng);
      const auto pf = l2_project(f, map, k);
      for (std::size_t i = 0; i < pf.nodal_values().size(); ++i)
        CHECK_THAT(pf.nodal_values()[i], WithinAbs(f(pf.node(i)), 1e-10));
    }

  // contraction: ||P f|| <= ||f||, and f - P f is orthogonal to Q_k
  const auto f = fields::sin_sum(2);
  const auto map = AffineMap::box(2, Point{0, 0, 0}, Point{0.7, 0.5, 0});
  const auto pf = l2_project(f, map, 3);
  CHECK(lp_norm(pf, 2.0) <= lp_norm(f, map, 2.0) * (1 + 1e-12));
  const auto g = gauss_rule_with_dop(30);
  const auto mr = map_rule(tensorize(*g, 2), map);
  const auto test = fields::random_polynomial(2, 3, rng);
  auto err = [&](const Point& x) { return f(x) - pf(x); };
  CHECK_THAT(discrete_inner_product(err, test, mr), WithinAbs(0.0, 1e-12));
}

TEST_CASE("discrete inner product") {
  const auto map = AffineMap::box(2, Point{0, 0, 0}, Point{0.3, 0.6, 0});
  auto one = [](const Point&) { return 1.0; };
  for (auto fam : {NodeFamily::Gauss, NodeFamily::GaussLobatto})
    CHECK_THAT(discrete_inner_product(one, one, map_rule(tensorize(make_rule(fam, 3), 2), map)),
               WithinAbs(0.18, 1e-15));
  // psi_k^2 under Gauss rules is exact
  for (int k = 1; k <= 10; ++k) {
    const auto mr = map_rule(tensorize(gauss_rule(k), 1), AffineMap::identity(1));
    auto psi = [k](const Point& x) { return legendre_eval(k, x[0]); };
    CHECK_THAT(discrete_inner_product(psi, psi, mr), WithinAbs(2.0 / (2 * k + 1), 1e-13));
  }
  // GL is exact for total degree 2k-1
  const int k = 4;
  const auto gl = map_rule(tensorize(gauss_lobatto_rule(k), 1), AffineMap::identity(1));
  auto u = [](const Point& x) { return legendre_eval(4, x[0]); };
  auto v = [](const Point& x) { return legendre_eval(3, x[0]) + x[0] * x[0]; };
  CHECK_THAT(discrete_inner_product(u, v, gl), WithinAbs(0.0, 1e-13));
  (void)k;
}

TEST_CASE("discrete projection on GL nodes is interpolation") {
  std::mt19937_64 rng(9);
  for (int d = 1; d <= 3; ++d) {
    const auto map = random_box(d, rng);
    const auto f = fields::sin_prod(d);
    const auto basis = cached_basis(NodeFamily::GaussLobatto, 3);
    const auto dp = discrete_l2_project(f, map, *cached_rule(NodeFamily::GaussLobatto, 3), basis);
    const auto iv = interpolate(f, map, basis);
    for (std::size_t i = 0; i < iv.nodal_values().size(); ++i)
      CHECK_THAT(dp.nodal_values()[i], WithinAbs(iv.nodal_values()[i], 1e-12));
  }
  const auto b2 = cached_basis(NodeFamily::GaussLobatto, 2);
  const auto s = discrete_l2_project(sin1d(), AffineMap::identity(1), *cached_rule(NodeFamily::GaussLobatto, 2), b2);
  CHECK_THAT(s.nodal_values()[1], WithinAbs(0.0, 1e-15));
}

TEST_CASE("lumping") {
  const auto map = AffineMap::box(2, Point{0, 0, 0}, Point{0.5, 0.25, 0});
  const auto l = lump([](const Point&) { return -3.0; }, gauss_lobatto_rule(3), map);
  CHECK_THAT(l.volumes().total_measure(), WithinAbs(0.125, 1e-15));
  for (double p : {1.0, 2.0, 4.0}) CHECK_THAT(lumped_lp_norm(l, p), WithinAbs(3.0 * std::pow(0.125, 1 / p), 1e-13));
  CHECK_THAT(lumped_lp_norm(l, kInf), WithinAbs(3.0, 1e-15));
}

TEST_CASE("embedded projector") {
  CHECK(valid_embedded_pair(1, 1));
  CHECK(valid_embedded_pair(2, 4));
  CHECK_FALSE(valid_embedded_pair(2, 3));
  CHECK_FALSE(valid_embedded_pair(3, 6));
  CHECK_THROWS(embedded_project(sin1d(), AffineMap::identity(1), 2, 3));

  const auto p = embedded_project(fields::monomial(MultiIndex::unit(1, 0)), AffineMap::identity(1), 1, 2);
  CHECK_THAT(p.nodal_values()[0], WithinAbs(-1.0, 1e-15));
  CHECK_THAT(p.nodal_values()[2], WithinAbs(1.0, 1e-15));

  // members of V_h^{K,k} (span of the subset nodal functions) are reproduced
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int d = 1; d <= 2; ++d)
    for (int K : {1, 2}) {
      const int k = 4;
      const auto map = random_box(d, rng);
      std::vector<double> vn(tensor_size(k + 1, d), 0.0);
      for (std::size_t i : embedded_subset_indices(K, k, d)) vn[i] = u(rng);
      const auto pv = embedded_project_nodal(vn, d, K, k);
      for (std::size_t i = 0; i < pv.size(); ++i) CHECK_THAT(pv[i], WithinAbs(vn[i], 1e-12));
      for (double x : fluctuation_nodal(vn, d, K, k)) CHECK_THAT(x, WithinAbs(0.0, 1e-12));
      // idempotent on arbitrary data
      const auto w = interpolate(fields::sin_sum(d), map, NodeFamily::GaussLobatto, k);
      const auto pw = embedded_project_nodal(w.nodal_values(), d, K, k);
      const auto ppw = embedded_project_nodal(pw, d, K, k);
      for (std::size_t i = 0; i < pw.size(); ++i) CHECK_THAT(ppw[i], WithinAbs(pw[i], 1e-12));
    }
}

TEST_CASE("fluctuation sign forms") {
  std::mt19937_64 rng(21);
  const auto map = AffineMap::box(2, Point{0, 0, 0}, Point{0.5, 0.5, 0});
  for (int s = 0; s < 20; ++s) {
    const auto v = interpolate(fields::random_polynomial(2, 4, rng), map, NodeFamily::GaussLobatto, 4);
    for (int m = 1; m <= 3; ++m) {
      const auto f = fluctuation_sign_forms(v, 2, m);
      CHECK(f.fluctuation >= -1e-12);
      CHECK(f.projection >= -1e-12);
    }
  }
  const auto c = interpolate(fields::constant(2, 1.7), map, NodeFamily::GaussLobatto, 4);
  const auto f = fluctuation_sign_forms(c, 1, 2);
  CHECK(f.fluctuation == 0.0);
  CHECK(f.projection == 0.0);
}

TEST_CASE("commutation error") {
  std::mt19937_64 rng(8);
  for (int d = 1; d <= 3; ++d)
    for (int k = 2; k <= 5; ++k)
      CHECK_THAT(commutation_error(fields::random_polynomial(d, k - 1, rng), random_box(d, rng), k), WithinAbs(0.0, 1e-10));

  const int k = 4;
  const auto rule = gauss_lobatto_rule(k);
  std::vector<double> ys;
  for (std::size_t i = 0; i < rule.size(); ++i) ys.push_back(std::sin(pi * rule.nodes[i]));
  const auto coef = vandermonde_fit(rule.nodes.values(), ys);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double diff = pi * std::cos(pi * rule.nodes[i]) - poly_deriv(coef, rule.nodes[i]);
    s += rule.weights[i] * diff * diff;
  }
  CHECK_THAT(commutation_error(sin1d(), AffineMap::identity(1), k), WithinAbs(std::sqrt(s), 1e-10));
}

TEST_CASE("lagrange square sum") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int d = 1; d <= 3; ++d)
    for (int k = 1; k <= 8; ++k) {
      const auto b = cached_basis(NodeFamily::GaussLobatto, k);
      Point node{};
      for (int a = 0; a < d; ++a) node[a] = b->node(std::min(a, k));
      CHECK_THAT(lagrange_square_sum(node, k, d), WithinAbs(1.0, 1e-13));
      for (int s = 0; s < 200; ++s) {
        Point x{};
        for (int a = 0; a < d; ++a) x[a] = u(rng);
        CHECK(lagrange_square_sum(x, k, d) <= 1.0 + 1e-10);
      }
    }
  CHECK_THROWS(lagrange_square_sum(Point{}, 3, 1, NodeFamily::Equispaced));
}
