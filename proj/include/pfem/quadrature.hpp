#pragma once

#include "pfem/geom.hpp"

#include <array>
#include <span>
#include <vector>

namespace pfem {

// Symmetric Gauss rule on the reference triangle; weights sum to the
// reference area 1/2. Available exactness degrees: 1, 2, 4.
struct TriRule {
  struct Point {
    double l1, l2, l3;  // barycentric
    double w;
  };
  int degree = 0;
  std::vector<Point> points;
};

const TriRule& triangle_rule(int degree);

// Centroid fan: triangles (centroid, v_i, v_{i+1}).
std::vector<std::array<Vec2, 3>> triangulate_fan(std::span<const Vec2> poly);

struct QuadPoint {
  Vec2 x;
  double w;
};

struct PolyQuadrature {
  std::vector<QuadPoint> points;
  int triangle_count = 0;
  double area = 0.0;  // sum of weights; equals the polygon area
};

// Fan triangulation + triangle Gauss rule mapped to physical coordinates.
// Exact for bivariate polynomials of total degree <= degree.
PolyQuadrature polygon_rule(std::span<const Vec2> poly, int degree);

// Gauss-Legendre on a segment; n_points in {1,2,3}, exact through degree 2n-1.
std::vector<QuadPoint> edge_rule(const Vec2& a, const Vec2& b, int n_points);

}  // namespace pfem
