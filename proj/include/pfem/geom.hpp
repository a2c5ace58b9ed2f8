#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace pfem {

using Vec2 = Eigen::Vector2d;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Signed area, positive for CCW winding.
double polygon_signed_area(std::span<const Vec2> poly);

struct PolygonGeometry {
  double area = 0.0;
  Vec2 centroid = Vec2::Zero();
};

// Shoelace area and area-weighted centroid. Throws for degenerate polygons
// (|area| below tolerance relative to the squared diameter).
PolygonGeometry polygon_geometry(std::span<const Vec2> poly);

double polygon_diameter(std::span<const Vec2> poly);

// Strictly convex: every cross product of consecutive edges clearly positive.
// Weakly convex allows collinear vertices (hanging nodes promoted to vertices).
bool polygon_convex_ccw(std::span<const Vec2> poly, bool* strictly = nullptr);

bool point_in_polygon(std::span<const Vec2> poly, const Vec2& p, double tol = 0.0);

struct Rect {
  double x0 = 0.0, y0 = 0.0;
  double width = 0.0, height = 0.0;

  double x1() const { return x0 + width; }
  double y1() const { return y0 + height; }
  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x() >= x0 - tol && p.x() <= x1() + tol && p.y() >= y0 - tol && p.y() <= y1() + tol;
  }
  std::vector<Vec2> corners() const {
    return {{x0, y0}, {x1(), y0}, {x1(), y1()}, {x0, y1()}};
  }
};

}  // namespace pfem
