#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "tpfe/linalg.hpp"
#include "tpfe/polybasis.hpp"
#include "tpfe/quadrature.hpp"

using namespace tpfe;
using Catch::Approx;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Gaussian elimination with partial pivoting; independent of the library solvers.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

// Legendre polynomials from the explicit sum formula
// psi_n(x) = 2^-n sum_j C(n,j)^2 (x-1)^{n-j} (x+1)^j.
double legendre_sum(int n, double x) {
  double s = 0.0, c = 1.0;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) c = c * (n - j + 1) / j;
    s += c * c * std::pow(x - 1, n - j) * std::pow(x + 1, j);
  }
  return s / std::pow(2.0, n);
}

}  // namespace

TEST_CASE("legendre values") {
  CHECK(legendre_eval(0, 0.37) == 1.0);
  CHECK_THAT(legendre_eval(2, 1.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(legendre_eval(2, 0.0), WithinAbs(-0.5, 1e-15));
  for (int n = 0; n <= kMaxDegree; ++n)
    for (double x : {-1.0, -0.73, -0.2, 0.0, 0.41, 0.9, 1.0})
      CHECK_THAT(legendre_eval(n, x), WithinAbs(legendre_sum(n, x), 1e-12));
}

TEST_CASE("legendre derivatives") {
  for (double x : {-0.8, 0.1, 0.7}) CHECK_THAT(legendre_derivative(1, x, 1), WithinAbs(1.0, 1e-14));
  CHECK_THAT(legendre_derivative(2, 0.5, 1), WithinAbs(1.5, 1e-14));
  CHECK_THAT(legendre_derivative(3, 1.0, 1), WithinAbs(6.0, 1e-13));
  // psi_n'(1) = n(n+1)/2
  for (int n = 1; n <= 10; ++n) CHECK_THAT(legendre_derivative(n, 1.0, 1), WithinRel(n * (n + 1) / 2.0, 1e-12));
  // central differences
  const double eps = 1e-5;
  for (int n = 2; n <= 8; ++n)
    for (double x : {-0.6, 0.3}) {
      const double fd = (legendre_derivative(n, x + eps, 1) - legendre_derivative(n, x - eps, 1)) / (2 * eps);
      CHECK_THAT(legendre_derivative(n, x, 2), WithinAbs(fd, 1e-6 * std::max(1.0, std::abs(fd))));
    }
  CHECK(legendre_derivative(3, 0.2, 4) == 0.0);
}

TEST_CASE("legendre orthogonality and norms") {
  const auto g = gauss_rule(kMaxDegree + 1);
  for (int i = 0; i <= kMaxDegree; ++i)
    for (int j = 0; j <= kMaxDegree; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < g.size(); ++q) s += g.weights[q] * legendre_eval(i, g.nodes[q]) * legendre_eval(j, g.nodes[q]);
      CHECK_THAT(s, WithinAbs(i == j ? 2.0 / (2 * i + 1) : 0.0, 1e-13));
    }
}

TEST_CASE("chebyshev") {
  CHECK_THAT(chebyshev_eval(3, 0.5), WithinAbs(-1.0, 1e-14));
  CHECK_THAT(chebyshev_eval(2, 0.0), WithinAbs(-1.0, 1e-15));
  for (int n = 0; n <= 20; ++n) {
    CHECK_THAT(chebyshev_eval(n, 1.0), WithinAbs(1.0, 1e-13));
    for (double t : {0.1, 0.9, 2.3}) CHECK_THAT(chebyshev_eval(n, std::cos(t)), WithinAbs(std::cos(n * t), 1e-12));
    if (n >= 1) CHECK_THAT(chebyshev_derivative(n, 1.0, 1), WithinRel(double(n) * n, 1e-12));
  }
  for (int n = 1; n <= 10; ++n)
    for (double t : {0.3, 1.2})
      CHECK_THAT(chebyshev_second_kind_eval(n - 1, std::cos(t)), WithinAbs(std::sin(n * t) / std::sin(t), 1e-12));
}

TEST_CASE("timan example polynomial") {
  for (double x : {-1.0, -0.3, 0.0, 0.8, 1.0}) CHECK_THAT(timan_example_eval(1, x), WithinAbs(1.0, 1e-14));
  for (int n = 1; n <= 8; ++n) CHECK_THAT(timan_example_eval(n, 1.0), WithinRel(std::pow(n, 4), 1e-12));
  // (1 - T_2^2)/(1 - x^2) = 4x^2, so the value at 0 vanishes
  CHECK_THAT(timan_example_eval(2, 0.0), WithinAbs(0.0, 1e-14));
  // away from +-1: (1 - T_n^2)/(1 - x^2) = U_{n-1}^2
  for (int n = 1; n <= 8; ++n)
    for (int i = 0; i <= 1000; ++i) {
      const double x = -0.999 + 1.998 * i / 1000;
      const double u = chebyshev_second_kind_eval(n - 1, x);
      CHECK_THAT(timan_example_eval(n, x), WithinAbs(u * u * u * u, 1e-10 * std::max(1.0, u * u * u * u)));
    }
  CHECK_THROWS(timan_example_eval(0, 0.1));
}

TEST_CASE("GL k=2 lagrange basis") {
  const auto b = cached_basis(NodeFamily::GaussLobatto, 2);
  CHECK_THAT(lagrange_eval(*b, 1, 0.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(lagrange_eval(*b, 0, 1.0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(lagrange_eval(*b, 1, 0.5), WithinAbs(0.75, 1e-15));
  CHECK_THAT(lagrange_derivative(*b, 1, 0.0), WithinAbs(0.0, 1e-14));
  CHECK_THAT(lagrange_derivative(*b, 2, 1.0), WithinAbs(1.5, 1e-14));
  const LagrangeBasis1D lin(NodeSet1D({-1.0, 1.0}));
  for (double x : {-1.0, -0.2, 0.6}) CHECK_THAT(lagrange_derivative(lin, 1, x), WithinAbs(0.5, 1e-15));
  CHECK_THROWS_AS(lagrange_eval(*b, 3, 0.0), std::out_of_range);
}

TEST_CASE("tensor basis") {
  const auto b = cached_basis(NodeFamily::GaussLobatto, 2);
  const double p00[2] = {-1.0, -1.0}, p10[2] = {0.5, -1.0}, p11[2] = {0.0, 0.0};
  MultiIndex a00(2), a10(2), a11(2);
  a10[0] = 1;
  a11[0] = a11[1] = 1;
  CHECK_THAT(tensor_basis_eval(a00, *b, p00), WithinAbs(1.0, 1e-15));
  CHECK_THAT(tensor_basis_eval(a10, *b, p10), WithinAbs(0.75, 1e-15));
  CHECK_THAT(tensor_basis_eval(a11, *b, p11), WithinAbs(1.0, 1e-15));
  MultiIndex big(2);
  big[0] = 3;
  CHECK_THROWS(tensor_basis_eval(big, *b, p00));
}

TEST_CASE("lagrange bases: kronecker, unity, vandermonde oracle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto fam : {NodeFamily::Gauss, NodeFamily::GaussLobatto, NodeFamily::Equispaced})
    for (int k = (fam == NodeFamily::Gauss ? 0 : 1); k <= 8; ++k) {
      const auto b = cached_basis(fam, k);
      for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j) CHECK_THAT(lagrange_eval(*b, i, b->node(j)), WithinAbs(i == j ? 1.0 : 0.0, 1e-13));
      // interpolate a random degree-k polynomial, compare with monomial Vandermonde solve
      std::vector<double> coef(k + 1);
      for (double& c : coef) c = u(rng);
      auto poly = [&](double x) {
        double s = 0.0;
        for (int m = k; m >= 0; --m) s = s * x + coef[m];
        return s;
      };
      std::vector<std::vector<double>> v(k + 1, std::vector<double>(k + 1));
      std::vector<double> y(k + 1), nodal(k + 1);
      for (int i = 0; i <= k; ++i) {
        for (int m = 0; m <= k; ++m) v[i][m] = std::pow(b->node(i), m);
        y[i] = nodal[i] = poly(b->node(i));
      }
      const auto c = dense_solve(v, y);
      for (int s = 0; s < 20; ++s) {
        const double x = u(rng);
        double sum = 0.0, oracle = 0.0;
        for (int i = 0; i <= k; ++i) sum += lagrange_eval(*b, i, x);
        for (int m = k; m >= 0; --m) oracle = oracle * x + c[m];
        CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
        CHECK_THAT(b->interpolate(nodal, x), WithinAbs(oracle, 1e-10));
      }
    }
}

TEST_CASE("node sets are validated") {
  CHECK_THROWS(NodeSet1D({}));
  CHECK_THROWS(NodeSet1D({0.0, 0.0}));
  CHECK_THROWS(NodeSet1D({-1.5, 0.0}));
  CHECK_THROWS(node_family_from_string("chebyshev"));
  CHECK(node_family_from_string("gl") == NodeFamily::GaussLobatto);
}
