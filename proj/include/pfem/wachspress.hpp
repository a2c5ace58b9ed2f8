#pragma once

#include "pfem/geom.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace pfem {

struct ShapeEval {
  Eigen::VectorXd N;                              // m values, partition of unity
  Eigen::Matrix<double, Eigen::Dynamic, 2> grad;  // m x 2, rows sum to zero
  Vec2 point = Vec2::Zero();
};

// Wachspress rational basis on a strictly convex CCW polygon. Points on the
// boundary (any edge distance below 1e-13 * diameter) are evaluated through
// the linear edge trace; points outside throw.
Eigen::VectorXd shape_values(std::span<const Vec2> poly, const Vec2& x);

// Analytic gradients: with R_f = n_f / h_f, grad N_k = N_k (R_k - sum_j N_j R_j)
// where R_k sums the two edges incident to vertex k. Interior points only.
Eigen::Matrix<double, Eigen::Dynamic, 2> shape_gradients(std::span<const Vec2> poly, const Vec2& x);

ShapeEval shape_eval(std::span<const Vec2> poly, const Vec2& x);

// Basis evaluator for one polygon. Strictly convex polygons use the direct
// Wachspress formulas above. Weakly convex polygons (collinear vertices, e.g.
// quadtree cells whose hanging nodes are promoted to vertices) degenerate the
// direct construction, so they are evaluated on a regular reference m-gon and
// mapped isoparametrically; physical-point queries invert the map by Newton
// iteration. Both constructions share linear edge traces, so meshes mixing
// the two stay conforming.
class PolygonBasis {
 public:
  explicit PolygonBasis(std::vector<Vec2> vertices);

  int size() const { return static_cast<int>(verts_.size()); }
  bool mapped() const { return mapped_; }
  const std::vector<Vec2>& vertices() const { return verts_; }
  double diameter() const { return diameter_; }

  ShapeEval eval(const Vec2& x, bool with_gradients = true) const;

 private:
  Vec2 to_reference(const Vec2& x) const;  // Newton inverse of the isoparametric map

  std::vector<Vec2> verts_;
  std::vector<Vec2> ref_;  // regular m-gon vertices when mapped_
  double diameter_ = 0.0;
  bool mapped_ = false;
};

}  // namespace pfem
