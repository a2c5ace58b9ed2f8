#include "pfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace pfem {

double polygon_signed_area(std::span<const Vec2> poly) {
  const std::size_t m = poly.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    twice += cross2(a, b);
  }
  return 0.5 * twice;
}

double polygon_diameter(std::span<const Vec2> poly) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j)
      d2 = std::max(d2, (poly[i] - poly[j]).squaredNorm());
  return std::sqrt(d2);
}

PolygonGeometry polygon_geometry(std::span<const Vec2> poly) {
  if (poly.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  const std::size_t m = poly.size();
  double twice = 0.0;
  Vec2 moment = Vec2::Zero();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double c = cross2(a, b);
    twice += c;
    moment += c * (a + b);
  }
  const double area = 0.5 * twice;
  const double diam = polygon_diameter(poly);
  if (!(std::abs(area) > 1e-14 * diam * diam)) {
    throw std::invalid_argument("degenerate polygon: area below tolerance");
  }
  PolygonGeometry g;
  g.area = area;
  g.centroid = moment / (6.0 * area);
  return g;
}

bool polygon_convex_ccw(std::span<const Vec2> poly, bool* strictly) {
  const std::size_t m = poly.size();
  if (m < 3) return false;
  double scale2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 e = poly[(i + 1) % m] - poly[i];
    scale2 = std::max(scale2, e.squaredNorm());
  }
  const double tol = 1e-12 * scale2;
  bool strict = true;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 e0 = poly[(i + 1) % m] - poly[i];
    const Vec2 e1 = poly[(i + 2) % m] - poly[(i + 1) % m];
    const double c = cross2(e0, e1);
    if (c < -tol) {
      if (strictly) *strictly = false;
      return false;
    }
    if (c <= tol) strict = false;
  }
  if (strictly) *strictly = strict;
  return true;
}

bool point_in_polygon(std::span<const Vec2> poly, const Vec2& p, double tol) {
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double c = cross2(b - a, p - a);
    if (c < -tol * (b - a).norm()) return false;
  }
  return true;
}

std::vector<Vec2> Mesh::element_polygon(int e) const {
  const PolyElement& el = elements[static_cast<std::size_t>(e)];
  std::vector<Vec2> poly;
  poly.reserve(el.nodes.size());
  for (int id : el.nodes) poly.push_back(point(id));
  return poly;
}

namespace {

EdgePair sorted_edge(int a, int b) { return a < b ? EdgePair{a, b} : EdgePair{b, a}; }

struct EdgeUse {
  int count = 0;
  int first_element = -1;
};

std::map<EdgePair, EdgeUse> edge_uses(const Mesh& mesh) {
  std::map<EdgePair, EdgeUse> uses;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& nd = mesh.elements[static_cast<std::size_t>(e)].nodes;
    const std::size_t m = nd.size();
    for (std::size_t i = 0; i < m; ++i) {
      auto& u = uses[sorted_edge(nd[i], nd[(i + 1) % m])];
      if (u.count == 0) u.first_element = e;
      ++u.count;
    }
  }
  return uses;
}

}  // namespace

std::vector<EdgePair> Mesh::boundary_edges() const {
  std::vector<EdgePair> out;
  for (const auto& [edge, use] : edge_uses(*this)) {
    if (use.count == 1) out.push_back(edge);
  }
  return out;
}

PolygonGeometry element_geometry(const Mesh& mesh, int element) {
  auto poly = mesh.element_polygon(element);
  return polygon_geometry(poly);
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  if (violations.empty()) {
    os << "mesh valid";
  } else {
    os << violations.size() << " violation(s):";
    for (const auto& v : violations) os << "\n  " << v.message;
  }
  return os.str();
}

namespace {

void add(ValidationReport& r, Violation::Kind kind, int index, std::string msg) {
  r.violations.push_back({kind, index, std::move(msg)});
}

// Nodes lying strictly inside some element edge would be unpromoted hanging
// nodes; conforming meshes must not have any.
void check_hanging_nodes(const Mesh& mesh, ValidationReport& report) {
  if (mesh.nodes.empty() || mesh.elements.empty()) return;

  double min_x = mesh.nodes[0].x, max_x = min_x, min_y = mesh.nodes[0].y, max_y = min_y;
  for (const auto& n : mesh.nodes) {
    min_x = std::min(min_x, n.x);
    max_x = std::max(max_x, n.x);
    min_y = std::min(min_y, n.y);
    max_y = std::max(max_y, n.y);
  }
  const double diam = std::hypot(max_x - min_x, max_y - min_y);
  if (diam <= 0.0) return;
  const double tol = 1e-9 * diam;

  // Bucket nodes on a uniform grid sized to the median edge length.
  std::vector<double> edge_lengths;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& nd = mesh.elements[static_cast<std::size_t>(e)].nodes;
    for (std::size_t i = 0; i < nd.size(); ++i) {
      if (nd[i] < 0 || nd[i] >= mesh.node_count()) return;  // reported elsewhere
      const Vec2 a = mesh.point(nd[i]);
      const Vec2 b = mesh.point(nd[(i + 1) % nd.size()]);
      edge_lengths.push_back((b - a).norm());
    }
  }
  if (edge_lengths.empty()) return;
  std::nth_element(edge_lengths.begin(), edge_lengths.begin() + edge_lengths.size() / 2,
                   edge_lengths.end());
  const double cell = std::max(edge_lengths[edge_lengths.size() / 2], 1e-12 * diam);

  const int gx = std::max(1, static_cast<int>((max_x - min_x) / cell) + 1);
  const int gy = std::max(1, static_cast<int>((max_y - min_y) / cell) + 1);
  auto bucket_of = [&](double x, double y) {
    int ix = std::clamp(static_cast<int>((x - min_x) / cell), 0, gx - 1);
    int iy = std::clamp(static_cast<int>((y - min_y) / cell), 0, gy - 1);
    return iy * gx + ix;
  };
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(gx) * gy);
  for (int i = 0; i < mesh.node_count(); ++i)
    buckets[static_cast<std::size_t>(bucket_of(mesh.nodes[i].x, mesh.nodes[i].y))].push_back(i);

  std::set<std::pair<int, int>> reported;  // (element, node)
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& nd = mesh.elements[static_cast<std::size_t>(e)].nodes;
    const std::size_t m = nd.size();
    for (std::size_t i = 0; i < m; ++i) {
      const int ia = nd[i], ib = nd[(i + 1) % m];
      const Vec2 a = mesh.point(ia), b = mesh.point(ib);
      const double len = (b - a).norm();
      if (len <= tol) continue;
      const Vec2 dir = (b - a) / len;
      const int bx0 = std::clamp(static_cast<int>((std::min(a.x(), b.x()) - min_x) / cell) - 1, 0, gx - 1);
      const int bx1 = std::clamp(static_cast<int>((std::max(a.x(), b.x()) - min_x) / cell) + 1, 0, gx - 1);
      const int by0 = std::clamp(static_cast<int>((std::min(a.y(), b.y()) - min_y) / cell) - 1, 0, gy - 1);
      const int by1 = std::clamp(static_cast<int>((std::max(a.y(), b.y()) - min_y) / cell) + 1, 0, gy - 1);
      for (int by = by0; by <= by1; ++by) {
        for (int bx = bx0; bx <= bx1; ++bx) {
          for (int nid : buckets[static_cast<std::size_t>(by) * gx + bx]) {
            if (nid == ia || nid == ib) continue;
            const Vec2 p = mesh.point(nid);
            const double s = dir.dot(p - a);
            if (s <= tol || s >= len - tol) continue;
            const double dist = std::abs(cross2(dir, p - a));
            if (dist < tol && reported.emplace(e, nid).second) {
              add(report, Violation::Kind::hanging_node, e,
                  "hanging node: node " + std::to_string(nid) + " lies inside an edge of element " +
                      std::to_string(e));
            }
          }
        }
      }
    }
  }
}

}  // namespace

ValidationReport validate(const Mesh& mesh) {
  ValidationReport report;

  for (int i = 0; i < mesh.node_count(); ++i) {
    if (!std::isfinite(mesh.nodes[static_cast<std::size_t>(i)].x) ||
        !std::isfinite(mesh.nodes[static_cast<std::size_t>(i)].y)) {
      add(report, Violation::Kind::bad_coordinate, i,
          "non-finite coordinates, node " + std::to_string(i));
    }
  }

  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& nd = mesh.elements[static_cast<std::size_t>(e)].nodes;
    bool ids_ok = true;
    if (nd.size() < 3 || nd.size() > kMaxPolygonVertices) {
      add(report, Violation::Kind::vertex_count, e,
          "element " + std::to_string(e) + " has " + std::to_string(nd.size()) + " vertices");
      ids_ok = nd.size() >= 3;
    }
    for (int id : nd) {
      if (id < 0 || id >= mesh.node_count()) {
        add(report, Violation::Kind::dangling_id, e,
            "dangling id " + std::to_string(id) + ", element " + std::to_string(e));
        ids_ok = false;
      }
    }
    if (!ids_ok) continue;
    std::set<int> unique(nd.begin(), nd.end());
    if (unique.size() != nd.size()) {
      add(report, Violation::Kind::repeated_id, e, "repeated node id, element " + std::to_string(e));
      continue;
    }

    const auto poly = mesh.element_polygon(e);
    const double area = polygon_signed_area(poly);
    const double diam = polygon_diameter(poly);
    if (std::abs(area) <= 1e-14 * diam * diam) {
      add(report, Violation::Kind::degenerate, e, "degenerate (zero area), element " + std::to_string(e));
      continue;
    }
    if (area < 0.0) {
      add(report, Violation::Kind::cw_winding, e, "CW winding, element " + std::to_string(e));
      continue;
    }
    if (!polygon_convex_ccw(poly)) {
      add(report, Violation::Kind::non_convex, e, "non-convex, element " + std::to_string(e));
    }
  }

  // Edge conformity: interior edges are shared by exactly two elements.
  const auto uses = edge_uses(mesh);
  for (const auto& [edge, use] : uses) {
    if (use.count > 2) {
      add(report, Violation::Kind::nonconforming_edge, use.first_element,
          "edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) + ") used by " +
              std::to_string(use.count) + " elements");
    }
  }

  for (const auto& [name, ids] : mesh.node_sets) {
    for (int id : ids) {
      if (id < 0 || id >= mesh.node_count()) {
        add(report, Violation::Kind::bad_set, id, "node set '" + name + "' references node " +
                                                      std::to_string(id));
      }
    }
  }
  for (const auto& [name, edges] : mesh.edge_sets) {
    for (const auto& [a, b] : edges) {
      if (a < 0 || a >= mesh.node_count() || b < 0 || b >= mesh.node_count()) {
        add(report, Violation::Kind::bad_set, a, "edge set '" + name + "' references a missing node");
        continue;
      }
      auto it = uses.find(sorted_edge(a, b));
      if (it == uses.end()) {
        add(report, Violation::Kind::bad_set, a,
            "edge set '" + name + "': (" + std::to_string(a) + "," + std::to_string(b) +
                ") is not a mesh edge");
      } else if (it->second.count != 1) {
        add(report, Violation::Kind::bad_set, a,
            "edge set '" + name + "': (" + std::to_string(a) + "," + std::to_string(b) +
                ") is not a boundary edge");
      }
    }
  }

  check_hanging_nodes(mesh, report);
  return report;
}

Mesh submesh(const Mesh& mesh, std::span<const int> keep_elements) {
  Mesh out;
  std::vector<int> node_map(static_cast<std::size_t>(mesh.node_count()), -1);
  for (int e : keep_elements) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    PolyElement copy;
    copy.material = el.material;
    copy.nodes.reserve(el.nodes.size());
    for (int id : el.nodes) {
      int& mapped = node_map[static_cast<std::size_t>(id)];
      if (mapped < 0) {
        mapped = out.node_count();
        out.nodes.push_back(mesh.nodes[static_cast<std::size_t>(id)]);
      }
      copy.nodes.push_back(mapped);
    }
    out.elements.push_back(std::move(copy));
  }
  for (const auto& [name, ids] : mesh.node_sets) {
    std::vector<int> mapped;
    for (int id : ids)
      if (node_map[static_cast<std::size_t>(id)] >= 0) mapped.push_back(node_map[static_cast<std::size_t>(id)]);
    if (!mapped.empty()) out.node_sets[name] = std::move(mapped);
  }
  for (const auto& [name, edges] : mesh.edge_sets) {
    std::vector<EdgePair> mapped;
    for (const auto& [a, b] : edges) {
      const int ma = node_map[static_cast<std::size_t>(a)], mb = node_map[static_cast<std::size_t>(b)];
      if (ma >= 0 && mb >= 0) mapped.emplace_back(ma, mb);
    }
    if (!mapped.empty()) out.edge_sets[name] = std::move(mapped);
  }
  return out;
}

}  // namespace pfem
