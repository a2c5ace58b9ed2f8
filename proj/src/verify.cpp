#include "pfem/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfem {

double AnalyticRing::temperature(double r) const { return 1.0 - std::log(r) / std::log(2.0); }

double AnalyticRing::radial_displacement(double r) const {
  return -0.5 * r * std::log(r) / std::log(2.0);
}

double AnalyticRing::radial_stress(double r) const {
  return -1.0 + (std::log(r) - 1.0) / (2.0 * std::log(2.0));
}

double l2_error(const Eigen::VectorXd& num, const Eigen::VectorXd& ref) {
  if (num.size() != ref.size()) throw std::invalid_argument("l2_error: size mismatch");
  const double rn = ref.norm();
  if (!(rn > 0.0)) throw std::invalid_argument("l2_error: zero reference norm");
  return (num - ref).norm() / rn;
}

double fitted_order(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size() || h.size() < 2) throw std::invalid_argument("fitted_order: need >= 2 points");
  const int n = static_cast<int>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(h[static_cast<std::size_t>(i)]);
    const double y = std::log(err[static_cast<std::size_t>(i)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

FieldInterpolator::FieldInterpolator(const Mesh& mesh) : mesh_(mesh) {
  if (mesh.nodes.empty() || mesh.elements.empty())
    throw std::invalid_argument("interpolator: empty mesh");
  double x0 = mesh.nodes[0].x, x1 = x0, y0 = mesh.nodes[0].y, y1 = y0;
  for (const auto& n : mesh.nodes) {
    x0 = std::min(x0, n.x);
    x1 = std::max(x1, n.x);
    y0 = std::min(y0, n.y);
    y1 = std::max(y1, n.y);
  }
  bbox_ = {x0, y0, x1 - x0, y1 - y0};

  double mean_diam = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    mean_diam += polygon_diameter(mesh.element_polygon(e));
  }
  mean_diam /= mesh.element_count();
  cell_ = std::max(mean_diam, 1e-12 * std::hypot(bbox_.width, bbox_.height));
  gx_ = std::max(1, static_cast<int>(bbox_.width / cell_) + 1);
  gy_ = std::max(1, static_cast<int>(bbox_.height / cell_) + 1);
  buckets_.assign(static_cast<std::size_t>(gx_) * gy_, {});

  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto poly = mesh.element_polygon(e);
    double ex0 = poly[0].x(), ex1 = ex0, ey0 = poly[0].y(), ey1 = ey0;
    for (const auto& v : poly) {
      ex0 = std::min(ex0, v.x());
      ex1 = std::max(ex1, v.x());
      ey0 = std::min(ey0, v.y());
      ey1 = std::max(ey1, v.y());
    }
    const int bx0 = std::clamp(static_cast<int>((ex0 - bbox_.x0) / cell_), 0, gx_ - 1);
    const int bx1 = std::clamp(static_cast<int>((ex1 - bbox_.x0) / cell_), 0, gx_ - 1);
    const int by0 = std::clamp(static_cast<int>((ey0 - bbox_.y0) / cell_), 0, gy_ - 1);
    const int by1 = std::clamp(static_cast<int>((ey1 - bbox_.y0) / cell_), 0, gy_ - 1);
    for (int by = by0; by <= by1; ++by)
      for (int bx = bx0; bx <= bx1; ++bx)
        buckets_[static_cast<std::size_t>(by) * gx_ + bx].push_back(e);
  }
}

int FieldInterpolator::locate(const Vec2& p) const {
  const double tol = 1e-9 * std::max(bbox_.width, bbox_.height);
  const int bx = std::clamp(static_cast<int>((p.x() - bbox_.x0) / cell_), 0, gx_ - 1);
  const int by = std::clamp(static_cast<int>((p.y() - bbox_.y0) / cell_), 0, gy_ - 1);
  // Exact containment first, then a tolerance pass over the 3x3 neighborhood
  // for points sitting on element boundaries or the domain hull.
  for (int pass = 0; pass < 2; ++pass) {
    const double t = pass == 0 ? 0.0 : tol;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int cx = bx + dx, cy = by + dy;
        if (cx < 0 || cx >= gx_ || cy < 0 || cy >= gy_) continue;
        for (int e : buckets_[static_cast<std::size_t>(cy) * gx_ + cx]) {
          if (point_in_polygon(mesh_.element_polygon(e), p, t)) return e;
        }
      }
    }
  }
  return -1;
}

double FieldInterpolator::scalar(const Vec2& p, const Eigen::VectorXd& nodal) const {
  const int e = locate(p);
  if (e < 0) throw std::runtime_error("interpolator: point outside mesh");
  const auto& el = mesh_.elements[static_cast<std::size_t>(e)];
  PolygonBasis basis(mesh_.element_polygon(e));
  const auto se = basis.eval(p, false);
  double v = 0.0;
  for (std::size_t i = 0; i < el.nodes.size(); ++i)
    v += se.N[static_cast<Eigen::Index>(i)] * nodal[el.nodes[i]];
  return v;
}

Vec2 FieldInterpolator::vector2(const Vec2& p, const Eigen::VectorXd& nodal2n) const {
  const int e = locate(p);
  if (e < 0) throw std::runtime_error("interpolator: point outside mesh");
  const auto& el = mesh_.elements[static_cast<std::size_t>(e)];
  PolygonBasis basis(mesh_.element_polygon(e));
  const auto se = basis.eval(p, false);
  Vec2 v = Vec2::Zero();
  for (std::size_t i = 0; i < el.nodes.size(); ++i) {
    v.x() += se.N[static_cast<Eigen::Index>(i)] * nodal2n[2 * el.nodes[i]];
    v.y() += se.N[static_cast<Eigen::Index>(i)] * nodal2n[2 * el.nodes[i] + 1];
  }
  return v;
}

}  // namespace pfem
