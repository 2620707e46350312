// Scalar fields with analytic partial derivatives, and the manufactured
// solutions used by the studies.
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tpfe/multi_index.hpp"
#include "tpfe/polybasis.hpp"

namespace tpfe {

using PointFn = std::function<double(const Point&)>;

class MissingPartial : public std::out_of_range {
 public:
  explicit MissingPartial(const std::string& what) : std::out_of_range(what) {}
};

/// f : R^d -> R together with its partials up to order l_max.
/// The partial factory may return an empty function for an unavailable partial.
class ScalarField {
 public:
  using PartialFactory = std::function<PointFn(const MultiIndex&)>;

  ScalarField(int dim, PointFn eval, PartialFactory partials, int l_max, std::string name = "field")
      : dim_(dim), eval_(std::move(eval)), partials_(std::move(partials)), l_max_(l_max), name_(std::move(name)) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("ScalarField: dimension must be 1..3");
    if (!eval_) throw std::invalid_argument("ScalarField: empty evaluation function");
  }

  /// A field without derivative information.
  ScalarField(int dim, PointFn eval, std::string name = "field")
      : ScalarField(dim, std::move(eval), nullptr, 0, std::move(name)) {}

  int dim() const { return dim_; }
  int l_max() const { return l_max_; }
  const std::string& name() const { return name_; }

  double operator()(const Point& x) const { return eval_(x); }

  bool has_partial(const MultiIndex& alpha) const {
    if (alpha.l1_norm() == 0) return true;
    return alpha.size() == dim_ && alpha.l1_norm() <= l_max_ && partials_ && static_cast<bool>(partials_(alpha));
  }

  /// d^alpha f; throws MissingPartial when not available.
  PointFn partial(const MultiIndex& alpha) const {
    if (alpha.size() != dim_) throw std::invalid_argument("ScalarField::partial: dimension mismatch");
    if (alpha.l1_norm() == 0) return eval_;
    if (alpha.l1_norm() > l_max_ || !partials_)
      throw MissingPartial(name_ + ": partial " + alpha.str() + " not available");
    PointFn fn = partials_(alpha);
    if (!fn) throw MissingPartial(name_ + ": partial " + alpha.str() + " not available");
    return fn;
  }

  double partial(const MultiIndex& alpha, const Point& x) const { return partial(alpha)(x); }

  /// a*f + b*g, partials up to min(l_max).
  friend ScalarField combine(double a, const ScalarField& f, double b, const ScalarField& g) {
    if (f.dim_ != g.dim_) throw std::invalid_argument("combine: dimension mismatch");
    auto fe = f.eval_, ge = g.eval_;
    auto fp = f.partials_, gp = g.partials_;
    const int lmax = std::min(f.l_max_, g.l_max_);
    PartialFactory parts = nullptr;
    if (fp && gp && lmax > 0) {
      parts = [a, b, fp, gp](const MultiIndex& alpha) -> PointFn {
        PointFn pf = fp(alpha), pg = gp(alpha);
        if (!pf || !pg) return {};
        return [a, b, pf, pg](const Point& x) { return a * pf(x) + b * pg(x); };
      };
    }
    return ScalarField(
        f.dim_, [a, b, fe, ge](const Point& x) { return a * fe(x) + b * ge(x); }, parts, parts ? lmax : 0,
        "(" + f.name_ + "," + g.name_ + ")");
  }

  friend ScalarField operator-(const ScalarField& f, const ScalarField& g) { return combine(1.0, f, -1.0, g); }
  friend ScalarField operator+(const ScalarField& f, const ScalarField& g) { return combine(1.0, f, 1.0, g); }

  /// Compares first-order partials with central differences and checks that
  /// mixed second partials agree under index permutation. Returns the max
  /// relative discrepancy seen at n random points in [-1,1]^d.
  double validate_partials(std::uint64_t seed = 1, int n = 20) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    double worst = 0.0;
    const double eps = 1e-6;
    for (int s = 0; s < n; ++s) {
      Point x{};
      for (int a = 0; a < dim_; ++a) x[a] = u(rng);
      for (int a = 0; a < dim_ && l_max_ >= 1; ++a) {
        Point xp = x, xm = x;
        xp[a] += eps;
        xm[a] -= eps;
        const double fd = (eval_(xp) - eval_(xm)) / (2 * eps);
        const double an = partial(MultiIndex::unit(dim_, a), x);
        worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
      }
      for (int a = 0; a < dim_ && l_max_ >= 2; ++a)
        for (int b = a + 1; b < dim_; ++b) {
          // d_b(d_a f) by differences of the first partial, both orders
          const PointFn fa = partial(MultiIndex::unit(dim_, a)), fb = partial(MultiIndex::unit(dim_, b));
          Point xp = x, xm = x;
          xp[b] += eps;
          xm[b] -= eps;
          const double dba = (fa(xp) - fa(xm)) / (2 * eps);
          xp = x;
          xm = x;
          xp[a] += eps;
          xm[a] -= eps;
          const double dab = (fb(xp) - fb(xm)) / (2 * eps);
          worst = std::max(worst, std::abs(dba - dab) / std::max(1.0, std::abs(dab)));
        }
    }
    return worst;
  }

 private:
  int dim_;
  PointFn eval_;
  PartialFactory partials_;
  int l_max_;
  std::string name_;
};

namespace fields {

inline constexpr int kAnalytic = 64;  // "infinitely smooth"

/// sin(pi * sum x_i)
inline ScalarField sin_sum(int d) {
  constexpr double pi = std::numbers::pi;
  auto sum = [d](const Point& x) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += x[a];
    return s;
  };
  return ScalarField(
      d, [sum](const Point& x) { return std::sin(pi * sum(x)); },
      [sum](const MultiIndex& alpha) -> PointFn {
        const int m = alpha.l1_norm();
        return [sum, m](const Point& x) { return std::pow(pi, m) * std::sin(pi * sum(x) + m * pi / 2); };
      },
      kAnalytic, "sin-sum");
}

/// exp(sum x_i)
inline ScalarField exp_sum(int d) {
  auto f = [d](const Point& x) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += x[a];
    return std::exp(s);
  };
  return ScalarField(d, f, [f](const MultiIndex&) -> PointFn { return f; }, kAnalytic, "exp-sum");
}

/// prod sin(pi x_i)
inline ScalarField sin_prod(int d) {
  constexpr double pi = std::numbers::pi;
  auto make = [d](MultiIndex alpha) -> PointFn {
    return [d, alpha](const Point& x) {
      double v = 1.0;
      for (int a = 0; a < d; ++a) v *= std::pow(pi, alpha[a]) * std::sin(pi * x[a] + alpha[a] * pi / 2);
      return v;
    };
  };
  return ScalarField(d, make(MultiIndex(d)), make, kAnalytic, "sin-prod");
}

/// prod x_i^{e_i}
inline ScalarField monomial(const MultiIndex& e) {
  const int d = e.size();
  auto make = [d, e](const MultiIndex& alpha) -> PointFn {
    double c = 1.0;
    MultiIndex p(d);
    for (int a = 0; a < d; ++a) {
      if (alpha[a] > e[a]) return [](const Point&) { return 0.0; };
      for (int j = 0; j < alpha[a]; ++j) c *= (e[a] - j);
      p[a] = e[a] - alpha[a];
    }
    return [d, c, p](const Point& x) {
      double v = c;
      for (int a = 0; a < d; ++a) v *= std::pow(x[a], p[a]);
      return v;
    };
  };
  return ScalarField(d, make(MultiIndex(d)), make, kAnalytic, "monomial" + e.str());
}

/// sum_alpha c_alpha prod psi_{alpha_i}(x_i), coefficients in linear_index
/// order over {0..k}^d. Belongs to Q_k.
inline ScalarField legendre_series(int d, int k, std::vector<double> coeffs) {
  if (coeffs.size() != tensor_size(k + 1, d)) throw std::invalid_argument("legendre_series: wrong coefficient count");
  auto c = std::make_shared<const std::vector<double>>(std::move(coeffs));
  auto make = [d, k, c](const MultiIndex& alpha) -> PointFn {
    return [d, k, c, alpha](const Point& x) {
      const int n1 = k + 1;
      std::vector<double> tab(static_cast<std::size_t>(d) * n1);
      for (int a = 0; a < d; ++a)
        for (int n = 0; n <= k; ++n)
          tab[a * n1 + n] = alpha[a] == 0 ? legendre_eval(n, x[a]) : legendre_derivative(n, x[a], alpha[a]);
      // contract axis 0 first (fastest index), then the others
      std::vector<double> cur(*c);
      std::size_t len = cur.size();
      for (int a = 0; a < d; ++a) {
        len /= n1;
        for (std::size_t j = 0; j < len; ++j) {
          double s = 0.0;
          for (int i = 0; i < n1; ++i) s += cur[j * n1 + i] * tab[a * n1 + i];
          cur[j] = s;
        }
      }
      return cur[0];
    };
  };
  return ScalarField(d, make(MultiIndex(d)), make, kAnalytic, "poly");
}

/// Random member of Q_k: Legendre coefficients i.i.d. U[-1,1].
inline ScalarField random_polynomial(int d, int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(tensor_size(k + 1, d));
  for (double& v : c) v = u(rng);
  return legendre_series(d, k, std::move(c));
}

/// |s - s0|^gamma with s = sum x_i. l_max is the largest m with
/// d^m f in L^2, i.e. m < gamma + 1/2.
inline ScalarField rough(int d, double gamma, double s0 = 0.1) {
  if (!(gamma > 0.0)) throw std::invalid_argument("rough: gamma must be positive");
  const int lmax = static_cast<int>(std::ceil(gamma + 0.5)) - 1;
  auto make = [d, gamma, s0](const MultiIndex& alpha) -> PointFn {
    const int m = alpha.l1_norm();
    double c = 1.0;
    for (int j = 0; j < m; ++j) c *= (gamma - j);
    return [d, gamma, s0, m, c](const Point& x) {
      double s = -s0;
      for (int a = 0; a < d; ++a) s += x[a];
      if (s == 0.0) return 0.0;
      const double sign = (s < 0 && m % 2 == 1) ? -1.0 : 1.0;
      return sign * c * std::pow(std::abs(s), gamma - m);
    };
  };
  return ScalarField(d, make(MultiIndex(d)), make, lmax, "rough");
}

inline ScalarField constant(int d, double c) {
  return ScalarField(
      d, [c](const Point&) { return c; },
      [](const MultiIndex&) -> PointFn { return [](const Point&) { return 0.0; }; }, kAnalytic, "const");
}

/// Named fields accepted by the CLI: sin-sum, exp-sum, sin-prod, rough.
inline ScalarField by_name(const std::string& name, int d) {
  if (name == "sin" || name == "sin-sum") return sin_sum(d);
  if (name == "exp" || name == "exp-sum") return exp_sum(d);
  if (name == "sin-prod") return sin_prod(d);
  if (name == "rough") return rough(d, 3.6);
  throw std::invalid_argument("unknown field '" + name + "'");
}

}  // namespace fields
}  // namespace tpfe
