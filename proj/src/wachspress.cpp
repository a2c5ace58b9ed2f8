#include "pfem/wachspress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace pfem {

namespace {

// Outward unit normals of a CCW polygon, edge i = (v_i, v_{i+1}).
std::vector<Vec2> outward_normals(std::span<const Vec2> poly) {
  const std::size_t m = poly.size();
  std::vector<Vec2> n(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 e = poly[(i + 1) % m] - poly[i];
    const double len = e.norm();
    if (!(len > 0.0)) throw std::invalid_argument("wachspress: zero-length edge");
    n[i] = Vec2(e.y(), -e.x()) / len;
  }
  return n;
}

struct DirectEval {
  Eigen::VectorXd N;
  Eigen::Matrix<double, Eigen::Dynamic, 2> R;  // per-vertex n/h sums, for gradients
  bool boundary = false;                       // evaluated through an edge/vertex limit
};

DirectEval direct_values(std::span<const Vec2> poly, const Vec2& x, bool need_R) {
  const std::size_t m = poly.size();
  const double diam = polygon_diameter(poly);
  const auto n = outward_normals(poly);

  std::vector<double> h(m);
  bool near_boundary = false;
  for (std::size_t i = 0; i < m; ++i) {
    h[i] = (poly[i] - x).dot(n[i]);
    if (h[i] < -1e-12 * diam) throw std::domain_error("wachspress: point outside polygon");
    if (h[i] < 1e-13 * diam) near_boundary = true;
  }

  DirectEval out;
  out.N = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));

  if (near_boundary) {
    // On (or within tolerance of) the boundary: use the linear edge trace, or
    // the Kronecker delta at a vertex.
    out.boundary = true;
    for (std::size_t k = 0; k < m; ++k) {
      if ((x - poly[k]).norm() <= 1e-12 * diam) {
        out.N[static_cast<Eigen::Index>(k)] = 1.0;
        return out;
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (h[i] >= 1e-13 * diam) continue;
      const Vec2 e = poly[(i + 1) % m] - poly[i];
      const double t = e.dot(x - poly[i]) / e.squaredNorm();
      if (t < -1e-9 || t > 1.0 + 1e-9) continue;
      const double tc = std::clamp(t, 0.0, 1.0);
      out.N[static_cast<Eigen::Index>(i)] = 1.0 - tc;
      out.N[static_cast<Eigen::Index>((i + 1) % m)] = tc;
      return out;
    }
    throw std::domain_error("wachspress: point outside polygon");
  }

  if (need_R) out.R.resize(static_cast<Eigen::Index>(m), 2);
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t prev = (k + m - 1) % m;
    const double w = cross2(n[prev], n[k]) / (h[prev] * h[k]);
    out.N[static_cast<Eigen::Index>(k)] = w;
    total += w;
    if (need_R) {
      const Vec2 r = n[prev] / h[prev] + n[k] / h[k];
      out.R(static_cast<Eigen::Index>(k), 0) = r.x();
      out.R(static_cast<Eigen::Index>(k), 1) = r.y();
    }
  }
  out.N /= total;
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> gradients_from(const DirectEval& ev) {
  if (ev.boundary) throw std::domain_error("wachspress: gradients need a strictly interior point");
  const Eigen::Index m = ev.N.size();
  const Eigen::RowVector2d mean = ev.N.transpose() * ev.R;  // sum_j N_j R_j
  Eigen::Matrix<double, Eigen::Dynamic, 2> g(m, 2);
  for (Eigen::Index k = 0; k < m; ++k) {
    g.row(k) = ev.N[k] * (ev.R.row(k) - mean);
  }
  return g;
}

// Linear edge-trace values when x lies within tol_abs of the polygon
// boundary; nullopt for interior points. Clearly exterior points throw.
std::optional<Eigen::VectorXd> edge_trace_values(std::span<const Vec2> poly, const Vec2& x,
                                                 double tol_abs) {
  const std::size_t m = poly.size();
  const auto n = outward_normals(poly);
  bool near_boundary = false;
  for (std::size_t i = 0; i < m; ++i) {
    const double h = (poly[i] - x).dot(n[i]);
    if (h < -tol_abs) throw std::domain_error("wachspress: point outside polygon");
    if (h < tol_abs) near_boundary = true;
  }
  if (!near_boundary) return std::nullopt;
  Eigen::VectorXd N = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    if ((x - poly[k]).norm() <= tol_abs) {
      N[static_cast<Eigen::Index>(k)] = 1.0;
      return N;
    }
  }
  // Collinear edges (hanging nodes) share the supporting line, so pick the
  // edge whose segment actually contains the point.
  for (std::size_t i = 0; i < m; ++i) {
    const double h = (poly[i] - x).dot(n[i]);
    if (h >= tol_abs) continue;
    const Vec2 e = poly[(i + 1) % m] - poly[i];
    const double t = e.dot(x - poly[i]) / e.squaredNorm();
    if (t < -1e-9 || t > 1.0 + 1e-9) continue;
    const double tc = std::clamp(t, 0.0, 1.0);
    N[static_cast<Eigen::Index>(i)] = 1.0 - tc;
    N[static_cast<Eigen::Index>((i + 1) % m)] = tc;
    return N;
  }
  throw std::domain_error("wachspress: point outside polygon");
}

std::vector<Vec2> regular_polygon(std::size_t m) {
  std::vector<Vec2> v(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(m);
    v[k] = {std::cos(t), std::sin(t)};
  }
  return v;
}

}  // namespace

Eigen::VectorXd shape_values(std::span<const Vec2> poly, const Vec2& x) {
  return direct_values(poly, x, false).N;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> shape_gradients(std::span<const Vec2> poly, const Vec2& x) {
  return gradients_from(direct_values(poly, x, true));
}

ShapeEval shape_eval(std::span<const Vec2> poly, const Vec2& x) {
  const auto ev = direct_values(poly, x, true);
  ShapeEval out;
  out.point = x;
  out.N = ev.N;
  out.grad = gradients_from(ev);
  return out;
}

PolygonBasis::PolygonBasis(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
  if (verts_.size() < 3) throw std::invalid_argument("polygon basis needs at least 3 vertices");
  bool strict = false;
  if (!polygon_convex_ccw(verts_, &strict)) {
    throw std::invalid_argument("polygon basis requires a convex CCW polygon");
  }
  diameter_ = polygon_diameter(verts_);
  mapped_ = !strict;
  if (mapped_) ref_ = regular_polygon(verts_.size());
}

Vec2 PolygonBasis::to_reference(const Vec2& x) const {
  // Newton on x(xi) = sum N_i(xi) v_i, starting from the reference centroid.
  // The reachable residual floor scales with the absolute coordinate
  // magnitude, not the element size.
  Vec2 xi = Vec2::Zero();
  double coord_scale = x.norm();
  for (const auto& v : verts_) coord_scale = std::max(coord_scale, v.norm());
  const double tol =
      std::max(1e-14 * diameter_, 8.0 * std::numeric_limits<double>::epsilon() * coord_scale);
  double prev_res = std::numeric_limits<double>::max();
  for (int it = 0; it < 80; ++it) {
    const auto ev = direct_values(ref_, xi, true);
    Vec2 mapped = Vec2::Zero();
    Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
    const auto grad = gradients_from(ev);
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      mapped += ev.N[k] * verts_[i];
      J.col(0) += grad(k, 0) * verts_[i];
      J.col(1) += grad(k, 1) * verts_[i];
    }
    const Vec2 r = x - mapped;
    const double res = r.norm();
    if (res <= tol && it > 0) return xi;
    Vec2 step = J.inverse() * r;
    // Damp steps that would leave the reference polygon; queries are interior
    // so the iteration stays inside.
    double scale = 1.0;
    while (scale > 1e-6 && !point_in_polygon(ref_, xi + scale * step, -1e-9)) scale *= 0.5;
    if (scale <= 1e-6) {
      xi *= 0.5;  // retreat toward the reference centroid and retry
      continue;
    }
    xi += scale * step;
    if (res >= prev_res && res <= 50.0 * tol) return xi;  // stagnated at roundoff
    prev_res = res;
  }
  throw std::runtime_error("polygon basis: Newton inversion did not converge");
}

ShapeEval PolygonBasis::eval(const Vec2& x, bool with_gradients) const {
  ShapeEval out;
  out.point = x;
  if (!mapped_) {
    const auto ev = direct_values(verts_, x, with_gradients);
    out.N = ev.N;
    if (with_gradients) out.grad = gradients_from(ev);
    return out;
  }
  if (auto trace = edge_trace_values(verts_, x, 1e-9 * diameter_)) {
    if (with_gradients)
      throw std::domain_error("polygon basis: gradients need a strictly interior point");
    out.N = std::move(*trace);
    return out;
  }
  const Vec2 xi = to_reference(x);
  const auto ev = direct_values(ref_, xi, true);
  out.N = ev.N;
  if (!with_gradients) return out;
  const auto gref = gradients_from(ev);
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    J.col(0) += gref(k, 0) * verts_[i];
    J.col(1) += gref(k, 1) * verts_[i];
  }
  // grad_x N = J^{-T} grad_xi N
  const Eigen::Matrix2d JinvT = J.inverse().transpose();
  out.grad.resize(gref.rows(), 2);
  for (Eigen::Index k = 0; k < gref.rows(); ++k) {
    const Vec2 g = JinvT * Vec2(gref(k, 0), gref(k, 1));
    out.grad(k, 0) = g.x();
    out.grad(k, 1) = g.y();
  }
  return out;
}

}  // namespace pfem
