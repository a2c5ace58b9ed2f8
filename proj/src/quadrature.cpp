#include "pfem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace pfem {

namespace {

TriRule make_rule(int degree) {
  TriRule rule;
  rule.degree = degree;
  // Weights normalized to the reference triangle area 1/2; all points strictly
  // interior so mapped quadrature points stay inside the polygon.
  switch (degree) {
    case 1: {
      rule.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.5}};
      break;
    }
    case 2: {
      const double a = 2.0 / 3, b = 1.0 / 6, w = 1.0 / 6;
      rule.points = {{a, b, b, w}, {b, a, b, w}, {b, b, a, w}};
      break;
    }
    case 4: {
      // Two symmetric 3-orbits; closed forms keep the rule exact to machine
      // precision for total degree <= 4.
      const double s10 = std::sqrt(10.0);
      const double t = std::sqrt(38.0 - 44.0 * std::sqrt(0.4));
      const double wsq = std::sqrt(213125.0 - 53320.0 * s10);
      const double a1 = (8.0 - s10 + t) / 18.0;   // 0.4459484909159649
      const double a2 = (8.0 - s10 - t) / 18.0;   // 0.0915762135097707
      const double w1 = (620.0 + wsq) / 3720.0;   // 0.2233815896780115
      const double w2 = (620.0 - wsq) / 3720.0;   // 0.1099517436553219
      auto orbit = [&rule](double a, double w) {
        const double b = 1.0 - 2.0 * a;
        rule.points.push_back({b, a, a, 0.5 * w});
        rule.points.push_back({a, b, a, 0.5 * w});
        rule.points.push_back({a, a, b, 0.5 * w});
      };
      orbit(a1, w1);
      orbit(a2, w2);
      break;
    }
    default:
      throw std::invalid_argument("unsupported quadrature degree (use 1, 2 or 4)");
  }
  return rule;
}

}  // namespace

const TriRule& triangle_rule(int degree) {
  static const TriRule r1 = make_rule(1);
  static const TriRule r2 = make_rule(2);
  static const TriRule r4 = make_rule(4);
  switch (degree) {
    case 1: return r1;
    case 2: return r2;
    case 4: return r4;
    default: throw std::invalid_argument("unsupported quadrature degree (use 1, 2 or 4)");
  }
}

std::vector<std::array<Vec2, 3>> triangulate_fan(std::span<const Vec2> poly) {
  const auto g = polygon_geometry(poly);  // throws on degenerate input
  std::vector<std::array<Vec2, 3>> tris;
  const std::size_t m = poly.size();
  tris.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    tris.push_back({g.centroid, poly[i], poly[(i + 1) % m]});
  }
  return tris;
}

PolyQuadrature polygon_rule(std::span<const Vec2> poly, int degree) {
  const TriRule& rule = triangle_rule(degree);
  PolyQuadrature q;
  const auto tris = triangulate_fan(poly);
  q.triangle_count = static_cast<int>(tris.size());
  q.points.reserve(tris.size() * rule.points.size());
  for (const auto& tri : tris) {
    // |J_t| maps reference-area weights to the physical triangle.
    const double jac = cross2(tri[1] - tri[0], tri[2] - tri[0]);
    for (const auto& gp : rule.points) {
      QuadPoint p;
      p.x = gp.l1 * tri[0] + gp.l2 * tri[1] + gp.l3 * tri[2];
      p.w = gp.w * jac;
      q.points.push_back(p);
      q.area += p.w;
    }
  }
  return q;
}

std::vector<QuadPoint> edge_rule(const Vec2& a, const Vec2& b, int n_points) {
  const double len = (b - a).norm();
  if (!(len > 0.0)) throw std::invalid_argument("edge_rule: zero-length segment");
  struct GL {
    double xi, w;
  };
  std::vector<GL> gl;
  switch (n_points) {
    case 1: gl = {{0.0, 2.0}}; break;
    case 2: {
      const double x = 1.0 / std::sqrt(3.0);
      gl = {{-x, 1.0}, {x, 1.0}};
      break;
    }
    case 3: {
      const double x = std::sqrt(0.6);
      gl = {{-x, 5.0 / 9}, {0.0, 8.0 / 9}, {x, 5.0 / 9}};
      break;
    }
    default:
      throw std::invalid_argument("edge_rule: n_points must be 1, 2 or 3");
  }
  std::vector<QuadPoint> out;
  out.reserve(gl.size());
  const Vec2 mid = 0.5 * (a + b);
  const Vec2 half = 0.5 * (b - a);
  for (const auto& p : gl) {
    out.push_back({mid + p.xi * half, 0.5 * len * p.w});
  }
  return out;
}

}  // namespace pfem
