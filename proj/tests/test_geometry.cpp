#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "tpfe/geometry.hpp"

using namespace tpfe;
using Catch::Matchers::WithinAbs;

TEST_CASE("metrics of a scaled square") {
  const double h = 0.4;
  const auto m = metrics(AffineMap::box(2, Point{0, 0, 0}, Point{h, h, 0}));
  CHECK_THAT(m.h, WithinAbs(h * std::sqrt(2.0), 1e-15));
  CHECK_THAT(m.rho, WithinAbs(h, 1e-15));
  CHECK_THAT(m.sigma, WithinAbs(std::sqrt(2.0), 1e-14));
  CHECK_THAT(m.volume, WithinAbs(h * h, 1e-15));
  CHECK_FALSE(m.rho_is_bound);
}

TEST_CASE("metrics of the identity") {
  const auto m = metrics(AffineMap::identity(1));
  CHECK(m.h == 2.0);
  CHECK(m.rho == 2.0);
  CHECK(m.sigma == 1.0);
  CHECK(m.volume == 2.0);
}

TEST_CASE("jacobian norms") {
  Mat3 j{};
  j[0][0] = 1.0;
  j[1][1] = 0.5;
  const AffineMap map(2, j, Point{});
  CHECK_THAT(map.abs_det(), WithinAbs(0.5, 1e-15));
  CHECK_THAT(metrics(map).volume, WithinAbs(2.0, 1e-15));
  CHECK_THAT(map.spectral_norm(), WithinAbs(1.0, 1e-12));
  CHECK_THAT(map.inverse_spectral_norm(), WithinAbs(2.0, 1e-12));
}

TEST_CASE("singular maps are rejected") {
  Mat3 j{};
  j[0][0] = 1.0;
  CHECK_THROWS(AffineMap(2, j, Point{}));
}

TEST_CASE("random maps: round trip and norm inequalities") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int d = 1; d <= 3; ++d)
    for (int s = 0; s < 50; ++s) {
      Mat3 j{};
      Point b{};
      for (int r = 0; r < d; ++r) {
        b[r] = u(rng);
        for (int c = 0; c < d; ++c) j[r][c] = 0.3 * u(rng) + (r == c ? 1.0 : 0.0);
      }
      const AffineMap map(d, j, b);
      Point x{};
      for (int a = 0; a < d; ++a) x[a] = u(rng);
      const Point y = map.inverse(map(x));
      for (int a = 0; a < d; ++a) CHECK_THAT(y[a], WithinAbs(x[a], 1e-12));
      const auto m = metrics(map);
      // ||J|| <= h_T / 2 and ||J^{-1}|| <= 2 / rho_T (rho here is 2/||J^{-1}|| or exact)
      CHECK(map.spectral_norm() <= m.h / 2 * (1 + 1e-12));
      CHECK(map.inverse_spectral_norm() <= 2.0 / m.rho * (1 + 1e-12));
      CHECK_THAT(m.volume, WithinAbs(std::pow(2.0, d) * std::abs(map.det()), 1e-12));
    }
}

TEST_CASE("cartesian mesh") {
  const auto mesh = build_cartesian_mesh(2, 0.0, 1.0, 2);
  REQUIRE(mesh.size() == 4);
  for (const auto& e : mesh.elements()) CHECK_THAT(metrics(e).volume, WithinAbs(0.25, 1e-15));
  CHECK_THAT(mesh.h(), WithinAbs(std::sqrt(2.0) / 2, 1e-15));
  for (int d = 1; d <= 3; ++d) CHECK_THAT(build_cartesian_mesh(d, -1.0, 1.0, 3).sigma0(), WithinAbs(std::sqrt(double(d)), 1e-14));
  const std::size_t e = mesh.locate(Point{0.75, 0.25, 0});
  const auto c = mesh.element(e).shift();
  CHECK_THAT(c[0], WithinAbs(0.75, 1e-15));
  CHECK_THAT(c[1], WithinAbs(0.25, 1e-15));
}

TEST_CASE("faces") {
  const double h = 0.5;
  const auto f1 = faces(AffineMap::identity(1));
  REQUIRE(f1.size() == 2);
  for (const auto& f : f1) CHECK(f.measure == 1.0);
  const auto f2 = faces(AffineMap::box(2, Point{0, 0, 0}, Point{h, h, 0}));
  REQUIRE(f2.size() == 4);
  for (const auto& f : f2) CHECK_THAT(f.measure, WithinAbs(h, 1e-15));
  const auto f3 = faces(AffineMap::box(3, Point{0, 0, 0}, Point{h, h, h}));
  REQUIRE(f3.size() == 6);
  for (const auto& f : f3) CHECK_THAT(f.measure, WithinAbs(h * h, 1e-15));
  // face rule weights sum to the face measure
  const auto fr = face_rule(f3[2], gauss_rule(2));
  double s = 0.0;
  for (double w : fr.weights) s += w;
  CHECK_THAT(s, WithinAbs(h * h, 1e-14));
  for (const auto& x : fr.ref_nodes) CHECK(x[1] == -1.0);
}
