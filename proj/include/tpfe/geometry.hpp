// Element metrics, Cartesian meshes and element faces.
#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tpfe/affine_map.hpp"
#include "tpfe/quadrature.hpp"

namespace tpfe {

struct ElementMetrics {
  double h = 0.0;        // diameter
  double rho = 0.0;      // diameter of the largest inscribed ball
  double sigma = 0.0;    // h / rho
  double volume = 0.0;   // |T|
  bool rho_is_bound = false;  // true when rho is only the lower bound 2/||J^{-1}||
};

inline ElementMetrics metrics(const AffineMap& map) {
  const int d = map.dim();
  ElementMetrics m;
  const std::size_t nv = std::size_t{1} << d;
  std::vector<Point> verts(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    Point xhat{};
    for (int a = 0; a < d; ++a) xhat[a] = (v >> a) & 1 ? 1.0 : -1.0;
    verts[v] = map(xhat);
  }
  for (std::size_t i = 0; i < nv; ++i)
    for (std::size_t j = i + 1; j < nv; ++j) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += (verts[i][a] - verts[j][a]) * (verts[i][a] - verts[j][a]);
      m.h = std::max(m.h, std::sqrt(s));
    }

  if (map.is_diagonal()) {
    m.rho = 2.0 * std::abs(map.jacobian()[0][0]);
    for (int a = 1; a < d; ++a) m.rho = std::min(m.rho, 2.0 * std::abs(map.jacobian()[a][a]));
  } else {
    m.rho = 2.0 / map.inverse_spectral_norm();
    m.rho_is_bound = true;
  }
  m.sigma = m.h / m.rho;
  m.volume = map.abs_det() * std::pow(2.0, d);
  return m;
}

/// Face of an element: the image of {xhat_axis = -1} (side 0) or {xhat_axis = +1} (side 1).
struct Face {
  std::size_t element = 0;
  int axis = 0;
  int side = 0;
  AffineMap map;           // the owning element's map
  double measure = 1.0;    // (d-1)-dimensional measure; counting measure in 1D
  double surface_jacobian = 1.0;  // |E| / 2^{d-1}

  int dim() const { return map.dim(); }
  std::vector<int> free_axes() const {
    std::vector<int> f;
    for (int a = 0; a < dim(); ++a)
      if (a != axis) f.push_back(a);
    return f;
  }
  bool axis_aligned() const { return map.is_diagonal(); }
};

inline std::vector<Face> faces(const AffineMap& map, std::size_t element = 0) {
  const int d = map.dim();
  std::vector<Face> out;
  for (int axis = 0; axis < d; ++axis) {
    // Gram determinant of the columns of J belonging to the free axes
    std::vector<int> free;
    for (int a = 0; a < d; ++a)
      if (a != axis) free.push_back(a);
    double sj = 1.0;
    if (free.size() == 1) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += map.jacobian()[i][free[0]] * map.jacobian()[i][free[0]];
      sj = std::sqrt(s);
    } else if (free.size() == 2) {
      double g00 = 0, g01 = 0, g11 = 0;
      for (int i = 0; i < d; ++i) {
        const double a = map.jacobian()[i][free[0]], b = map.jacobian()[i][free[1]];
        g00 += a * a;
        g01 += a * b;
        g11 += b * b;
      }
      sj = std::sqrt(g00 * g11 - g01 * g01);
    }
    for (int side = 0; side < 2; ++side)
      out.push_back(Face{element, axis, side, map, sj * std::pow(2.0, d - 1), sj});
  }
  return out;
}

/// Quadrature on a face: tensorized 1D rule over the free axes. ref_nodes are
/// element reference coordinates (the fixed coordinate is +-1).
struct FaceRule {
  std::vector<Point> ref_nodes;
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

inline FaceRule face_rule(const Face& face, const QuadRule1D& rule) {
  const int d = face.dim();
  const double fixed = face.side == 0 ? -1.0 : 1.0;
  FaceRule fr;
  if (d == 1) {
    Point xhat{fixed, 0.0, 0.0};
    fr.ref_nodes.push_back(xhat);
    fr.nodes.push_back(face.map(xhat));
    fr.weights.push_back(1.0);
    return fr;
  }
  const auto free = face.free_axes();
  const QuadRuleTensor t = tensorize(rule, d - 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    Point xhat{};
    xhat[face.axis] = fixed;
    for (std::size_t f = 0; f < free.size(); ++f) xhat[free[f]] = t.nodes[i][f];
    fr.ref_nodes.push_back(xhat);
    fr.nodes.push_back(face.map(xhat));
    fr.weights.push_back(face.surface_jacobian * t.weights[i]);
  }
  return fr;
}

class Mesh {
 public:
  int dim() const { return dim_; }
  const Point& lower() const { return lo_; }
  const Point& upper() const { return hi_; }
  const std::array<int, kMaxDim>& divisions() const { return div_; }
  const std::vector<AffineMap>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  const AffineMap& element(std::size_t i) const { return elements_.at(i); }
  bool cartesian() const { return cartesian_; }

  double h() const { return h_; }
  double sigma0() const { return sigma0_; }
  /// min h_T / h
  double c_qu() const { return c_qu_; }

  /// Index of an element containing x (Cartesian meshes only).
  std::size_t locate(const Point& x) const {
    if (!cartesian_) throw std::logic_error("Mesh::locate: only for Cartesian meshes");
    std::size_t idx = 0, stride = 1;
    for (int a = 0; a < dim_; ++a) {
      const double t = (x[a] - lo_[a]) / (hi_[a] - lo_[a]) * div_[a];
      const int i = std::clamp(static_cast<int>(std::floor(t)), 0, div_[a] - 1);
      idx += stride * i;
      stride *= div_[a];
    }
    return idx;
  }

  friend Mesh build_cartesian_mesh(int dim, const Point& lo, const Point& hi, std::array<int, kMaxDim> div);
  friend Mesh single_element_mesh(const AffineMap& map);

 private:
  void finish() {
    h_ = 0.0;
    sigma0_ = 0.0;
    double hmin = std::numeric_limits<double>::infinity();
    for (const auto& e : elements_) {
      const auto m = metrics(e);
      h_ = std::max(h_, m.h);
      hmin = std::min(hmin, m.h);
      sigma0_ = std::max(sigma0_, m.sigma);
    }
    c_qu_ = hmin / h_;
  }

  int dim_ = 1;
  Point lo_{}, hi_{};
  std::array<int, kMaxDim> div_{1, 1, 1};
  std::vector<AffineMap> elements_;
  bool cartesian_ = true;
  double h_ = 0.0, sigma0_ = 0.0, c_qu_ = 1.0;
};

/// Axis-aligned mesh of [lo, hi] with div[a] elements along axis a, element
/// index in lexicographic order with axis 0 fastest.
inline Mesh build_cartesian_mesh(int dim, const Point& lo, const Point& hi, std::array<int, kMaxDim> div) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("build_cartesian_mesh: dimension must be 1..3");
  Mesh m;
  m.dim_ = dim;
  m.lo_ = lo;
  m.hi_ = hi;
  for (int a = 0; a < dim; ++a) {
    if (div[a] < 1) throw std::invalid_argument("build_cartesian_mesh: divisions must be positive");
    if (!(hi[a] > lo[a])) throw std::invalid_argument("build_cartesian_mesh: degenerate box");
  }
  for (int a = dim; a < kMaxDim; ++a) div[a] = 1;
  m.div_ = div;

  const std::size_t total = static_cast<std::size_t>(div[0]) * div[1] * div[2];
  m.elements_.reserve(total);
  for (std::size_t e = 0; e < total; ++e) {
    std::size_t rest = e;
    Point elo{}, ehi{};
    for (int a = 0; a < dim; ++a) {
      const int i = static_cast<int>(rest % div[a]);
      rest /= div[a];
      const double w = (hi[a] - lo[a]) / div[a];
      elo[a] = lo[a] + w * i;
      ehi[a] = (i + 1 == div[a]) ? hi[a] : lo[a] + w * (i + 1);
    }
    m.elements_.push_back(AffineMap::box(dim, elo, ehi));
  }
  m.finish();
  return m;
}

inline Mesh build_cartesian_mesh(int dim, const Point& lo, const Point& hi, int n) {
  return build_cartesian_mesh(dim, lo, hi, {n, n, n});
}

/// [-1,1]^d or [0,1]^d style cube split into n^d elements.
inline Mesh build_cartesian_mesh(int dim, double lo, double hi, int n) {
  Point l{}, u{};
  for (int a = 0; a < dim; ++a) {
    l[a] = lo;
    u[a] = hi;
  }
  return build_cartesian_mesh(dim, l, u, n);
}

inline Mesh single_element_mesh(const AffineMap& map) {
  Mesh m;
  m.dim_ = map.dim();
  m.cartesian_ = map.is_diagonal();
  for (int a = 0; a < m.dim_; ++a) {
    const double j = std::abs(map.jacobian()[a][a]);
    m.lo_[a] = map.shift()[a] - j;
    m.hi_[a] = map.shift()[a] + j;
  }
  m.elements_.push_back(map);
  m.finish();
  return m;
}

}  // namespace tpfe
