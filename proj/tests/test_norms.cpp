#include "catch_amalgamated.hpp"

#include <cmath>

#include "tpfe/geometry.hpp"
#include "tpfe/norms.hpp"
#include "tpfe/operators.hpp"

using namespace tpfe;
using Catch::Matchers::WithinAbs;

namespace {
MultiIndex mi(std::initializer_list<int> v) {
  MultiIndex m(static_cast<int>(v.size()));
  int i = 0;
  for (int x : v) m[i++] = x;
  return m;
}
}  // namespace

TEST_CASE("lp norms of simple fields") {
  const auto ref1 = AffineMap::identity(1);
  const auto x = fields::monomial(mi({1}));
  CHECK_THAT(lp_norm(x, ref1, 2.0), WithinAbs(std::sqrt(2.0 / 3), 1e-14));
  CHECK_THAT(lp_norm(x, ref1, kInf), WithinAbs(1.0, 1e-14));
  const auto box = AffineMap::box(2, Point{0, 0, 0}, Point{0.5, 0.2, 0});
  for (double p : {1.0, 2.0, 4.0, 6.0})
    CHECK_THAT(lp_norm(fields::constant(2, -2.0), box, p), WithinAbs(2.0 * std::pow(0.1, 1 / p), 1e-14));
  CHECK_THAT(lp_norm(fields::constant(2, -2.0), box, kInf), WithinAbs(2.0, 1e-15));
  // polynomial version agrees
  const auto iv = interpolate(x, ref1, NodeFamily::GaussLobatto, 3);
  CHECK_THAT(lp_norm(iv, 2.0), WithinAbs(std::sqrt(2.0 / 3), 1e-14));
  CHECK_THAT(lp_norm(iv, kInf), WithinAbs(1.0, 1e-14));
  // |x|^p integrates to 2/(p+1)
  for (double p : {1.0, 4.0, 6.0}) CHECK_THAT(lp_norm(iv, p), WithinAbs(std::pow(2.0 / (p + 1), 1 / p), 1e-12));
  // sign change away from the panel breaks: |x - 0.3| integrates to 1.09
  const auto shifted = interpolate([](const Point& y) { return y[0] - 0.3; }, ref1, NodeFamily::GaussLobatto, 3);
  CHECK_THAT(lp_norm(shifted, 1.0), WithinAbs(1.09, 1e-3));
}

TEST_CASE("sobolev seminorms") {
  const auto ref1 = AffineMap::identity(1);
  const auto ref2 = AffineMap::identity(2);
  const auto sq = fields::monomial(mi({2}));
  CHECK_THAT(sobolev_seminorm(sq, ref1, 0, 2.0), WithinAbs(lp_norm(sq, ref1, 2.0), 1e-15));
  CHECK_THAT(sobolev_seminorm(sq, ref1, 2, 2.0), WithinAbs(2.0 * std::sqrt(2.0), 1e-13));
  // |xy|_1 = sqrt(||y||^2 + ||x||^2) over [-1,1]^2, each 4/3
  const auto xy = fields::monomial(mi({1, 1}));
  CHECK_THAT(sobolev_seminorm(xy, ref2, 1, 2.0), WithinAbs(std::sqrt(8.0 / 3), 1e-13));
  const auto v = interpolate(xy, ref2, NodeFamily::GaussLobatto, 2);
  CHECK_THAT(sobolev_seminorm(v, 1, 2.0), WithinAbs(std::sqrt(8.0 / 3), 1e-13));
  CHECK_THAT(sobolev_norm(v, 1, 2.0), WithinAbs(std::sqrt(4.0 / 9 + 8.0 / 3), 1e-13));
  CHECK_THAT(error_seminorm(xy, v, 1, 2.0), WithinAbs(0.0, 1e-13));
}

TEST_CASE("face norms") {
  const auto sq = AffineMap::box(2, Point{0, 0, 0}, Point{1, 1, 0});
  for (const auto& f : faces(sq)) CHECK_THAT(face_norm(fields::constant(2, 3.0), f, 0, 2.0), WithinAbs(3.0, 1e-14));
  const auto f1 = faces(AffineMap::identity(1));
  CHECK_THAT(face_norm(fields::monomial(mi({1})), f1[1], 0, 2.0), WithinAbs(1.0, 1e-15));
  const auto f2 = faces(AffineMap::identity(2));
  const Face& top = f2[3];  // axis 1, side 1: y = 1
  REQUIRE(top.axis == 1);
  REQUIRE(top.side == 1);
  CHECK_THAT(face_norm(fields::monomial(mi({1, 0})), top, 0, 2.0), WithinAbs(std::sqrt(2.0 / 3), 1e-14));
  // tangential derivative only: d/dx (x y) = y = 1 on the face
  CHECK_THAT(face_norm(fields::monomial(mi({1, 1})), top, 1, 2.0), WithinAbs(std::sqrt(2.0), 1e-13));
}

TEST_CASE("discrete lp norms") {
  const auto box = AffineMap::box(1, Point{0, 0, 0}, Point{0.5, 0, 0});
  const auto mr = map_rule(tensorize(gauss_lobatto_rule(2), 1), box);
  CHECK_THAT(discrete_lp_norm(std::vector<double>(3, 2.0), mr, 2.0), WithinAbs(2.0 * std::sqrt(0.5), 1e-15));
  for (int k = 1; k <= 10; ++k) {
    const auto g = map_rule(tensorize(gauss_rule(k), 1), AffineMap::identity(1));
    auto psi = [k](const Point& x) { return legendre_eval(k, x[0]); };
    CHECK_THAT(discrete_lp_norm(psi, g, 2.0), WithinAbs(std::sqrt(2.0 / (2 * k + 1)), 1e-13));
  }
  CHECK_THROWS(discrete_lp_norm(std::vector<double>(3, 1.0), mr, kInf));
}

TEST_CASE("mass matrices") {
  const auto e = lagrange_mass_extremes(NodeFamily::GaussLobatto, 1, 1);
  CHECK_THAT(e.lambda_min, WithinAbs(1.0 / 3, 1e-14));
  CHECK_THAT(e.lambda_max, WithinAbs(1.0, 1e-14));
  // Kronecker structure: extremes are d-th powers
  for (int d = 2; d <= 3; ++d) {
    const auto ed = lagrange_mass_extremes(NodeFamily::GaussLobatto, 1, d);
    CHECK_THAT(ed.lambda_min, WithinAbs(std::pow(1.0 / 3, d), 1e-13));
    CHECK_THAT(ed.lambda_max, WithinAbs(1.0, 1e-13));
  }
  for (int k = 0; k <= 6; ++k) {
    const auto l = legendre_mass_extremes(k, 1);
    CHECK_THAT(l.lambda_min, WithinAbs(2.0 / (2 * k + 1), 1e-13));
    CHECK_THAT(l.lambda_max, WithinAbs(2.0, 1e-13));
  }
  CHECK_THROWS(lagrange_mass_extremes(NodeFamily::GaussLobatto, 9, 3));
}

TEST_CASE("parse_p") {
  CHECK(parse_p("2") == 2.0);
  CHECK(std::isinf(parse_p("inf")));
  CHECK_THROWS(parse_p("0.5"));
}
