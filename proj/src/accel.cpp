#include "pfem/accel.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace pfem {

namespace {

// Slot layout on the unit square, CCW from the lower-left corner. Even slots
// are corners, odd slots mid-edge nodes for mask bits 0..3.
constexpr double kSlotCoords[8][2] = {
    {0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {1.0, 0.5},
    {1.0, 1.0}, {0.5, 1.0}, {0.0, 1.0}, {0.0, 0.5},
};

int slot_to_bit(int slot) { return (slot - 1) / 2; }  // odd slots only

}  // namespace

std::string pattern_string(std::uint8_t mask) {
  std::string s(4, '0');
  for (int b = 0; b < 4; ++b)
    if (mask & (1u << b)) s[static_cast<std::size_t>(b)] = '1';
  return s;  // (bottom, right, top, left)
}

std::vector<Vec2> pattern_polygon(std::uint8_t mask, double side, const Vec2& origin) {
  std::vector<Vec2> poly;
  for (int slot = 0; slot < 8; ++slot) {
    if (slot % 2 == 1 && !(mask & (1u << slot_to_bit(slot)))) continue;
    poly.emplace_back(origin.x() + side * kSlotCoords[slot][0],
                      origin.y() + side * kSlotCoords[slot][1]);
  }
  return poly;
}

std::optional<SquarePattern> canonical_pattern(std::span<const Vec2> poly, double rel_tol) {
  const int m = static_cast<int>(poly.size());
  if (m < 4 || m > 8) return std::nullopt;

  double x0 = poly[0].x(), x1 = x0, y0 = poly[0].y(), y1 = y0;
  for (const auto& v : poly) {
    x0 = std::min(x0, v.x());
    x1 = std::max(x1, v.x());
    y0 = std::min(y0, v.y());
    y1 = std::max(y1, v.y());
  }
  const double side = x1 - x0;
  if (!(side > 0.0) || std::abs((y1 - y0) - side) > rel_tol * side) return std::nullopt;
  const double tol = rel_tol * side;

  int slot_of[8];
  bool used[8] = {};
  for (int i = 0; i < m; ++i) {
    int found = -1;
    for (int slot = 0; slot < 8; ++slot) {
      const Vec2 ref(x0 + side * kSlotCoords[slot][0], y0 + side * kSlotCoords[slot][1]);
      if ((poly[static_cast<std::size_t>(i)] - ref).lpNorm<Eigen::Infinity>() <= tol) {
        found = slot;
        break;
      }
    }
    if (found < 0 || used[found]) return std::nullopt;
    used[found] = true;
    slot_of[i] = found;
  }
  for (int corner = 0; corner < 8; corner += 2)
    if (!used[corner]) return std::nullopt;

  SquarePattern pat;
  pat.side = side;
  pat.origin = {x0, y0};
  for (int slot = 1; slot < 8; slot += 2)
    if (used[slot]) pat.mask |= static_cast<std::uint8_t>(1u << slot_to_bit(slot));

  // Parent index of each present slot, then the element-local permutation.
  int rank[8];
  int next = 0;
  for (int slot = 0; slot < 8; ++slot) rank[slot] = used[slot] ? next++ : -1;
  pat.perm.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pat.perm[static_cast<std::size_t>(i)] = rank[slot_of[i]];

  // CCW order check: parent ranks must be a cyclic rotation of 0..m-1.
  for (int i = 0; i < m; ++i) {
    const int a = pat.perm[static_cast<std::size_t>(i)];
    const int b = pat.perm[static_cast<std::size_t>((i + 1) % m)];
    if ((a + 1) % m != b) return std::nullopt;
  }
  return pat;
}

const ParentCache::ThermalParent& ParentCache::thermal_parent(std::uint8_t mask, bool& miss) {
  auto it = thermal_.find(mask);
  if (it != thermal_.end()) return it->second;
  miss = true;

  const auto poly = pattern_polygon(mask);
  PolygonBasis basis(poly);
  const auto ev = evaluate_element(basis, quad_degree_);
  const int m = basis.size();
  ThermalParent par;
  par.Kx = Eigen::MatrixXd::Zero(m, m);
  par.Ky = Eigen::MatrixXd::Zero(m, m);
  par.M = Eigen::MatrixXd::Zero(m, m);
  for (int p = 0; p < static_cast<int>(ev.N.rows()); ++p) {
    const double w = ev.quad.points[static_cast<std::size_t>(p)].w;
    par.Kx.noalias() += w * ev.dNdx.row(p).transpose() * ev.dNdx.row(p);
    par.Ky.noalias() += w * ev.dNdy.row(p).transpose() * ev.dNdy.row(p);
    par.M.noalias() += w * ev.N.row(p).transpose() * ev.N.row(p);
  }
  par.Kx = 0.5 * (par.Kx + par.Kx.transpose()).eval();
  par.Ky = 0.5 * (par.Ky + par.Ky.transpose()).eval();
  par.M = 0.5 * (par.M + par.M.transpose()).eval();
  return thermal_.emplace(mask, std::move(par)).first->second;
}

const ParentCache::ElasticParent& ParentCache::elastic_parent(std::uint8_t mask, const Material& mat,
                                                              bool& miss) {
  const ElasticKey key{mask, mat.nu, mat.plane};
  auto it = elastic_.find(key);
  if (it != elastic_.end()) return it->second;
  miss = true;

  Material unit = mat;
  unit.E = 1.0;
  unit.alpha = 1.0;
  unit.kx = unit.ky = unit.rho = unit.c = 1.0;
  unit.thickness = 1.0;
  const auto poly = pattern_polygon(mask);
  PolygonBasis basis(poly);
  const auto em = matrices_from_evaluation(evaluate_element(basis, quad_degree_), unit);
  ElasticParent par;
  par.K = em.K_el;
  par.C = em.C_el;
  return elastic_.emplace(key, std::move(par)).first->second;
}

ElementMatrices ParentCache::scaled_matrices(const SquarePattern& pat, const Material& mat) {
  bool miss = false;
  const ThermalParent& th = thermal_parent(pat.mask, miss);
  const ElasticParent& el = elastic_parent(pat.mask, mat, miss);
  if (miss) {
    ++stats_.misses;
  } else {
    ++stats_.hits;
  }
  stats_.entries = thermal_.size() + elastic_.size();

  const double L = pat.side;
  const double t = mat.thickness;
  const int m = static_cast<int>(pat.perm.size());

  // 2D conduction and elasticity are scale invariant; mass scales with area,
  // the coupling block with one length factor.
  ElementMatrices out;
  out.K_th.resize(m, m);
  out.M_th.resize(m, m);
  out.K_el.resize(2 * m, 2 * m);
  out.C_el.resize(2 * m, m);
  const Eigen::MatrixXd K_th_par = t * (mat.kx * th.Kx + mat.ky * th.Ky);
  const Eigen::MatrixXd M_th_par = (mat.rho * mat.c * t * L * L) * th.M;
  const Eigen::MatrixXd K_el_par = (mat.E * t) * el.K;
  const Eigen::MatrixXd C_el_par = (mat.E * mat.alpha * t * L) * el.C;

  const auto& perm = pat.perm;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int pi = perm[static_cast<std::size_t>(i)], pj = perm[static_cast<std::size_t>(j)];
      out.K_th(i, j) = K_th_par(pi, pj);
      out.M_th(i, j) = M_th_par(pi, pj);
      out.C_el(2 * i, j) = C_el_par(2 * pi, pj);
      out.C_el(2 * i + 1, j) = C_el_par(2 * pi + 1, pj);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out.K_el(2 * i + a, 2 * j + b) = K_el_par(2 * pi + a, 2 * pj + b);
    }
  }
  return out;
}

std::optional<ElementMatrices> ParentCache::scaled_matrices(std::span<const Vec2> poly,
                                                            const Material& mat) {
  const auto pat = canonical_pattern(poly);
  if (!pat) return std::nullopt;
  return scaled_matrices(*pat, mat);
}

}  // namespace pfem
