#pragma once

#include "pfem/element.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pfem {

// Hanging-node pattern of an axis-aligned square cell: one bit per mid-edge
// node, (bottom, right, top, left) = bits 0..3.
struct SquarePattern {
  std::uint8_t mask = 0;
  double side = 0.0;
  Vec2 origin = Vec2::Zero();   // lower-left corner
  std::vector<int> perm;        // element-local vertex -> parent slot
};

std::string pattern_string(std::uint8_t mask);  // "0100" = mid node on the right edge

// Parent-order vertex list for a pattern: corners CCW from the lower-left,
// with present mid-edge nodes inserted.
std::vector<Vec2> pattern_polygon(std::uint8_t mask, double side = 1.0, const Vec2& origin = {0, 0});

// Detects axis-aligned squares whose vertices are the 4 corners plus any
// subset of exact mid-edge points. General polygons return nullopt and fall
// back to direct integration.
std::optional<SquarePattern> canonical_pattern(std::span<const Vec2> poly, double rel_tol = 1e-9);

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t entries = 0;
};

// Parent-element matrix cache. Parents are computed once per pattern on the
// unit square with unit parameters and rescaled per element:
//   K_th = t (kx Kx + ky Ky),  M_th = rho c t L^2 M,
//   K_el = E t K(nu,plane),    C_el = E alpha t L C(nu,plane).
// Conduction and elasticity are scale-invariant in 2D, so the mappings are
// exact; the mass matrix picks up the L^2 area factor.
class ParentCache {
 public:
  explicit ParentCache(int quad_degree = 4) : quad_degree_(quad_degree) {}

  // Matrices in element-local vertex order, or nullopt for non-square cells.
  std::optional<ElementMatrices> scaled_matrices(std::span<const Vec2> poly, const Material& mat);
  ElementMatrices scaled_matrices(const SquarePattern& pat, const Material& mat);

  CacheStats stats() const { return stats_; }
  void reset_stats() { stats_.hits = stats_.misses = 0; }

 private:
  struct ThermalParent {
    Eigen::MatrixXd Kx, Ky;  // unit-conductivity x/y parts
    Eigen::MatrixXd M;       // unit rho c, unit side
  };
  struct ElasticParent {
    Eigen::MatrixXd K;  // E = 1
    Eigen::MatrixXd C;  // E = 1, alpha = 1, unit side
  };
  struct ElasticKey {
    std::uint8_t mask;
    double nu;
    Plane plane;
    bool operator<(const ElasticKey& o) const {
      if (mask != o.mask) return mask < o.mask;
      if (nu != o.nu) return nu < o.nu;
      return plane < o.plane;
    }
  };

  const ThermalParent& thermal_parent(std::uint8_t mask, bool& miss);
  const ElasticParent& elastic_parent(std::uint8_t mask, const Material& mat, bool& miss);

  int quad_degree_;
  std::map<std::uint8_t, ThermalParent> thermal_;
  std::map<ElasticKey, ElasticParent> elastic_;
  CacheStats stats_;
};

}  // namespace pfem
