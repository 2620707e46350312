#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tpfe/linalg.hpp"

using namespace tpfe;
using Catch::Matchers::WithinAbs;

TEST_CASE("jacobi eigenvalues: 2x2 closed form") {
  Matrix m(2, 2);
  m(0, 0) = m(1, 1) = 2.0 / 3;
  m(0, 1) = m(1, 0) = 1.0 / 3;
  const auto e = symmetric_eigenvalues(m);
  CHECK_THAT(e.eigenvalues[0], WithinAbs(1.0 / 3, 1e-14));
  CHECK_THAT(e.eigenvalues[1], WithinAbs(1.0, 1e-14));
}

TEST_CASE("jacobi eigenvalues: tridiagonal toeplitz") {
  // eigenvalues of tridiag(-1, 2, -1) are 2 - 2 cos(j pi / (n+1))
  const int n = 12;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 2.0;
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = -1.0;
  }
  const auto e = symmetric_eigenvalues(m);
  std::vector<double> ref;
  for (int j = 1; j <= n; ++j) ref.push_back(2.0 - 2.0 * std::cos(j * std::numbers::pi / (n + 1)));
  std::sort(ref.begin(), ref.end());
  for (int j = 0; j < n; ++j) CHECK_THAT(e.eigenvalues[j], WithinAbs(ref[j], 1e-12));
}

TEST_CASE("kronecker products multiply spectra") {
  Matrix a(2, 2), b(3, 3);
  a(0, 0) = 2;
  a(1, 1) = 5;
  b(0, 0) = 1;
  b(1, 1) = 3;
  b(2, 2) = 7;
  const auto k = kronecker(a, b);
  REQUIRE(k.rows() == 6);
  const auto e = symmetric_eigenvalues(k);
  CHECK_THAT(e.eigenvalues.front(), WithinAbs(2.0, 1e-14));
  CHECK_THAT(e.eigenvalues.back(), WithinAbs(35.0, 1e-14));
}

TEST_CASE("cholesky solve") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 6;
  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = u(rng);
  Matrix a(n, n);  // b b^T + n I
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int m = 0; m < n; ++m) a(i, j) += b(i, m) * b(j, m);
      if (i == j) a(i, j) += n;
    }
  std::vector<double> x(n), rhs(n, 0.0);
  for (double& v : x) v = u(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rhs[i] += a(i, j) * x[j];
  cholesky_solve(cholesky(a), rhs);
  for (int i = 0; i < n; ++i) CHECK_THAT(rhs[i], WithinAbs(x[i], 1e-12));
}
