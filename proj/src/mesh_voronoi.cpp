#include "pfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace pfem {

namespace {

// Keep the half-plane of points closer to p than to site.
void clip_bisector(std::vector<Vec2>& poly, std::vector<Vec2>& tmp, const Vec2& p, const Vec2& site) {
  const Vec2 d = site - p;
  const Vec2 mid = 0.5 * (p + site);
  tmp.clear();
  const std::size_t m = poly.size();
  if (m == 0) return;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double fa = d.dot(a - mid);
    const double fb = d.dot(b - mid);
    if (fa <= 0.0) tmp.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb <= 0.0)) {
      const double t = fa / (fa - fb);
      tmp.push_back(a + t * (b - a));
    }
  }
  poly.swap(tmp);
}

// Keep {x : x.dot(n) <= c}.
void clip_halfplane(std::vector<Vec2>& poly, std::vector<Vec2>& tmp, const Vec2& n, double c) {
  tmp.clear();
  const std::size_t m = poly.size();
  if (m == 0) return;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double fa = n.dot(a) - c;
    const double fb = n.dot(b) - c;
    if (fa <= 0.0) tmp.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb <= 0.0)) {
      const double t = fa / (fa - fb);
      tmp.push_back(a + t * (b - a));
    }
  }
  poly.swap(tmp);
}

struct SiteGrid {
  Rect box;
  double cell = 1.0;
  int gx = 1, gy = 1;
  std::vector<std::vector<int>> buckets;

  void build(const std::vector<Vec2>& sites, double cell_size) {
    cell = cell_size;
    double x0 = sites[0].x(), x1 = x0, y0 = sites[0].y(), y1 = y0;
    for (const auto& s : sites) {
      x0 = std::min(x0, s.x());
      x1 = std::max(x1, s.x());
      y0 = std::min(y0, s.y());
      y1 = std::max(y1, s.y());
    }
    box = {x0, y0, std::max(x1 - x0, cell), std::max(y1 - y0, cell)};
    gx = static_cast<int>(box.width / cell) + 1;
    gy = static_cast<int>(box.height / cell) + 1;
    buckets.assign(static_cast<std::size_t>(gx) * gy, {});
    for (int i = 0; i < static_cast<int>(sites.size()); ++i) {
      buckets[index_of(sites[static_cast<std::size_t>(i)])].push_back(i);
    }
  }
  std::size_t index_of(const Vec2& p) const {
    const int ix = std::clamp(static_cast<int>((p.x() - box.x0) / cell), 0, gx - 1);
    const int iy = std::clamp(static_cast<int>((p.y() - box.y0) / cell), 0, gy - 1);
    return static_cast<std::size_t>(iy) * gx + ix;
  }
  // Bucket indices on the Chebyshev ring k around p's bucket.
  void ring(const Vec2& p, int k, std::vector<int>& out) const {
    out.clear();
    const int cx = std::clamp(static_cast<int>((p.x() - box.x0) / cell), 0, gx - 1);
    const int cy = std::clamp(static_cast<int>((p.y() - box.y0) / cell), 0, gy - 1);
    for (int iy = cy - k; iy <= cy + k; ++iy) {
      if (iy < 0 || iy >= gy) continue;
      for (int ix = cx - k; ix <= cx + k; ++ix) {
        if (ix < 0 || ix >= gx) continue;
        if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != k) continue;
        for (int id : buckets[static_cast<std::size_t>(iy) * gx + ix]) out.push_back(id);
      }
    }
  }
  int max_ring() const { return std::max(gx, gy); }
};

struct VoronoiSetup {
  bool is_rect = true;
  Rect rect;
  Annulus ann;
  double area = 0.0;

  std::vector<Vec2> start_polygon(double margin) const {
    if (is_rect) return rect.corners();
    const double r = ann.outer_radius + margin;
    return {{-r, -r}, {r, -r}, {r, r}, {-r, r}};
  }
};

double max_vertex_dist2(const std::vector<Vec2>& poly, const Vec2& p) {
  double d2 = 0.0;
  for (const auto& v : poly) d2 = std::max(d2, (v - p).squaredNorm());
  return d2;
}

// One Voronoi pass: cells for every seed, clipped to the domain.
std::vector<std::vector<Vec2>> voronoi_cells(const VoronoiSetup& dom, const std::vector<Vec2>& seeds) {
  const int n = static_cast<int>(seeds.size());
  const double spacing = std::sqrt(dom.area / n);

  // Site list: seeds first, then boundary reflections (annulus only; for
  // rectangles the cells are clipped to the rectangle directly).
  std::vector<Vec2> sites = seeds;
  if (!dom.is_rect) {
    const double band = 4.0 * spacing;
    const double a = dom.ann.inner_radius, b = dom.ann.outer_radius;
    for (const auto& p : seeds) {
      const double r = p.norm();
      if (r <= 0.0) continue;
      if (b - r < band) sites.push_back(p * ((2.0 * b - r) / r));
      if (r - a < band) {
        const Vec2 q = p * ((2.0 * a - r) / r);
        const double rq = q.norm();
        if (rq <= a || rq >= b) sites.push_back(q);  // never reflect into the domain
      }
    }
  }

  SiteGrid grid;
  grid.build(sites, spacing);

  std::vector<std::vector<Vec2>> cells(static_cast<std::size_t>(n));
  std::vector<Vec2> poly, tmp;
  std::vector<int> ring;
  std::vector<std::pair<double, int>> ordered;

  for (int i = 0; i < n; ++i) {
    const Vec2 p = seeds[static_cast<std::size_t>(i)];
    poly = dom.start_polygon(2.0 * spacing);
    if (!dom.is_rect) {
      // Tangent clips keep cells out of the hole and inside the outer circle
      // band even before the reflected sites cut in.
      const double r = p.norm();
      if (r > 0.0) {
        const Vec2 rhat = p / r;
        clip_halfplane(poly, tmp, rhat, dom.ann.outer_radius);
        if (dom.ann.inner_radius > 0.0) clip_halfplane(poly, tmp, -rhat, -dom.ann.inner_radius);
      }
    }
    double rmax2 = max_vertex_dist2(poly, p);
    for (int k = 0; k <= grid.max_ring(); ++k) {
      grid.ring(p, k, ring);
      ordered.clear();
      for (int id : ring) {
        if (id == i) continue;
        ordered.emplace_back((sites[static_cast<std::size_t>(id)] - p).squaredNorm(), id);
      }
      std::sort(ordered.begin(), ordered.end());
      for (const auto& [d2, id] : ordered) {
        if (d2 > 4.0 * rmax2) break;
        clip_bisector(poly, tmp, p, sites[static_cast<std::size_t>(id)]);
        if (poly.size() < 3) break;
        rmax2 = max_vertex_dist2(poly, p);
      }
      if (poly.size() < 3) break;
      // All sites beyond ring k are at least (k-1) grid cells away.
      const double ring_dist = (k - 1) * grid.cell;
      if (ring_dist > 0.0 && ring_dist * ring_dist > 4.0 * rmax2) break;
    }
    if (poly.size() < 3) {
      throw std::runtime_error("voronoi: seed degeneracy after clipping (seed " + std::to_string(i) + ")");
    }
    cells[static_cast<std::size_t>(i)] = poly;
  }
  return cells;
}

class PointWelder {
 public:
  explicit PointWelder(double tol) : tol_(tol), cell_(4.0 * tol) {}

  // Returns the id of a previously seen point within tol, or registers p.
  int id_of(const Vec2& p, std::vector<Vec2>& points) {
    const auto [kx, ky] = key(p);
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        auto it = map_.find({kx + dx, ky + dy});
        if (it == map_.end()) continue;
        for (int id : it->second) {
          if ((points[static_cast<std::size_t>(id)] - p).norm() <= tol_) return id;
        }
      }
    }
    const int id = static_cast<int>(points.size());
    points.push_back(p);
    map_[{kx, ky}].push_back(id);
    return id;
  }

 private:
  std::pair<std::int64_t, std::int64_t> key(const Vec2& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
            static_cast<std::int64_t>(std::floor(p.y() / cell_))};
  }
  struct Hash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const {
      return std::hash<std::int64_t>()(k.first * 1000003 + k.second);
    }
  };
  double tol_;
  double cell_;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<int>, Hash> map_;
};

// Collapse interior Voronoi edges much shorter than the cell scale: they
// produce nearly coincident vertices whose rational basis functions are
// needle-like and integrate poorly. Endpoints merge at their midpoint
// (boundary nodes dominate interior ones); a collapse that would break the
// convexity of an incident cell is skipped.
void collapse_short_edges(Mesh& mesh, double threshold, const VoronoiSetup& dom) {
  std::vector<signed char> on_boundary(mesh.nodes.size(), 0);
  for (const auto& e : mesh.boundary_edges()) {
    on_boundary[static_cast<std::size_t>(e.first)] = 1;
    on_boundary[static_cast<std::size_t>(e.second)] = 1;
  }

  // Boundary nodes may merge along the same boundary feature (same side of
  // the rectangle, same circle) but never across a rectangle corner.
  const double btol = 1e-7 * (dom.is_rect ? std::hypot(dom.rect.width, dom.rect.height)
                                          : dom.ann.outer_radius);
  auto side_mask = [&](const Vec2& p) {
    unsigned mask = 0;
    if (dom.is_rect) {
      if (std::abs(p.x() - dom.rect.x0) < btol) mask |= 1;
      if (std::abs(p.x() - dom.rect.x1()) < btol) mask |= 2;
      if (std::abs(p.y() - dom.rect.y0) < btol) mask |= 4;
      if (std::abs(p.y() - dom.rect.y1()) < btol) mask |= 8;
    } else {
      mask |= p.norm() < 0.5 * (dom.ann.inner_radius + dom.ann.outer_radius) ? 1 : 2;
    }
    return mask;
  };
  auto boundary_mergeable = [&](const Vec2& pa, const Vec2& pb) {
    const unsigned ma = side_mask(pa), mb = side_mask(pb);
    if (dom.is_rect && (__builtin_popcount(ma) > 1 || __builtin_popcount(mb) > 1)) return false;
    return ma == mb && ma != 0;
  };
  std::vector<std::vector<int>> incident(mesh.nodes.size());
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (int id : mesh.elements[static_cast<std::size_t>(e)].nodes)
      incident[static_cast<std::size_t>(id)].push_back(e);
  }

  struct Cand {
    double len;
    int a, b;
  };
  std::vector<Cand> cands;
  std::map<EdgePair, char> seen;
  for (const auto& el : mesh.elements) {
    const std::size_t m = el.nodes.size();
    for (std::size_t i = 0; i < m; ++i) {
      const int a = el.nodes[i], b = el.nodes[(i + 1) % m];
      const EdgePair key = a < b ? EdgePair{a, b} : EdgePair{b, a};
      if (!seen.emplace(key, 1).second) continue;
      const double len = (mesh.point(a) - mesh.point(b)).norm();
      if (len < threshold) cands.push_back({len, key.first, key.second});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    return x.len != y.len ? x.len < y.len : std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });

  std::vector<int> remap(mesh.nodes.size());
  for (std::size_t i = 0; i < remap.size(); ++i) remap[i] = static_cast<int>(i);
  auto resolve = [&](int id) {
    while (remap[static_cast<std::size_t>(id)] != id) id = remap[static_cast<std::size_t>(id)];
    return id;
  };

  for (const auto& c : cands) {
    const int a = resolve(c.a), b = resolve(c.b);
    if (a == b) continue;
    const bool ba = on_boundary[static_cast<std::size_t>(a)], bb = on_boundary[static_cast<std::size_t>(b)];
    if (ba && bb && !boundary_mergeable(mesh.point(a), mesh.point(b))) continue;
    const int keep = ba ? a : (bb ? b : a);
    const int drop = keep == a ? b : a;
    const Node saved_keep = mesh.nodes[static_cast<std::size_t>(keep)];
    if (ba == bb) {  // both interior or both on the same feature: midpoint
      mesh.nodes[static_cast<std::size_t>(keep)] = {
          0.5 * (mesh.point(a).x() + mesh.point(b).x()),
          0.5 * (mesh.point(a).y() + mesh.point(b).y())};
    }

    // Trial: rewrite incident cells and verify they stay convex polygons.
    std::vector<int> cells_touched = incident[static_cast<std::size_t>(drop)];
    for (int e : incident[static_cast<std::size_t>(keep)]) cells_touched.push_back(e);
    std::sort(cells_touched.begin(), cells_touched.end());
    cells_touched.erase(std::unique(cells_touched.begin(), cells_touched.end()), cells_touched.end());

    bool ok = true;
    std::vector<std::pair<int, std::vector<int>>> rewritten;
    for (int e : cells_touched) {
      std::vector<int> ids;
      for (int id : mesh.elements[static_cast<std::size_t>(e)].nodes) {
        const int r = resolve(id) == drop ? keep : resolve(id);
        if (ids.empty() || ids.back() != r) ids.push_back(r);
      }
      while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
      if (ids.size() < 3) {
        ok = false;
        break;
      }
      std::vector<Vec2> poly;
      for (int id : ids) poly.push_back(mesh.point(id));
      if (polygon_signed_area(poly) <= 0.0 || !polygon_convex_ccw(poly)) {
        ok = false;
        break;
      }
      rewritten.emplace_back(e, std::move(ids));
    }
    if (!ok) {
      mesh.nodes[static_cast<std::size_t>(keep)] = saved_keep;
      continue;
    }
    for (auto& [e, ids] : rewritten) mesh.elements[static_cast<std::size_t>(e)].nodes = std::move(ids);
    remap[static_cast<std::size_t>(drop)] = keep;
    for (int e : cells_touched) incident[static_cast<std::size_t>(keep)].push_back(e);
  }

  // Drop orphaned nodes and renumber.
  std::vector<int> order(mesh.nodes.size(), -1);
  Mesh out;
  for (auto& el : mesh.elements) {
    for (int& id : el.nodes) {
      const int r = resolve(id);
      if (order[static_cast<std::size_t>(r)] < 0) {
        order[static_cast<std::size_t>(r)] = out.node_count();
        out.nodes.push_back(mesh.nodes[static_cast<std::size_t>(r)]);
      }
      id = order[static_cast<std::size_t>(r)];
    }
  }
  out.elements = std::move(mesh.elements);
  mesh = std::move(out);
}

Mesh cells_to_mesh(const VoronoiSetup& dom, const std::vector<std::vector<Vec2>>& cells) {
  const double diam = dom.is_rect ? std::hypot(dom.rect.width, dom.rect.height)
                                  : 2.0 * dom.ann.outer_radius;
  PointWelder welder(1e-9 * diam);

  Mesh mesh;
  std::vector<Vec2> points;
  for (const auto& cell : cells) {
    PolyElement el;
    for (const auto& v : cell) {
      const int id = welder.id_of(v, points);
      if (el.nodes.empty() || el.nodes.back() != id) el.nodes.push_back(id);
    }
    while (el.nodes.size() > 1 && el.nodes.front() == el.nodes.back()) el.nodes.pop_back();
    if (el.nodes.size() < 3) throw std::runtime_error("voronoi: cell collapsed during welding");
    mesh.elements.push_back(std::move(el));
  }
  mesh.nodes.reserve(points.size());
  for (const auto& p : points) mesh.nodes.push_back({p.x(), p.y()});

  collapse_short_edges(mesh, 0.2 * std::sqrt(dom.area / static_cast<double>(cells.size())), dom);

  // Boundary sets from boundary edges.
  const auto boundary = mesh.boundary_edges();
  auto add_edge = [&](const std::string& name, const EdgePair& e) {
    mesh.edge_sets[name].push_back(e);
    mesh.node_sets[name].push_back(e.first);
    mesh.node_sets[name].push_back(e.second);
  };
  if (dom.is_rect) {
    const double tol = 1e-9 * diam;
    for (const auto& e : boundary) {
      const Vec2 mid = 0.5 * (mesh.point(e.first) + mesh.point(e.second));
      if (std::abs(mid.x() - dom.rect.x0) < tol) add_edge("left", e);
      else if (std::abs(mid.x() - dom.rect.x1()) < tol) add_edge("right", e);
      else if (std::abs(mid.y() - dom.rect.y0) < tol) add_edge("bottom", e);
      else if (std::abs(mid.y() - dom.rect.y1()) < tol) add_edge("top", e);
    }
  } else {
    const double split = 0.5 * (dom.ann.inner_radius + dom.ann.outer_radius);
    for (const auto& e : boundary) {
      const Vec2 mid = 0.5 * (mesh.point(e.first) + mesh.point(e.second));
      add_edge(mid.norm() < split ? "inner" : "outer", e);
    }
  }
  for (auto& [name, ids] : mesh.node_sets) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return mesh;
}

Mesh generate(const VoronoiSetup& dom, std::vector<Vec2> seeds, int lloyd_iters) {
  if (seeds.size() < 4) throw std::invalid_argument("voronoi: need at least 4 seeds");
  for (int it = 0; it < lloyd_iters; ++it) {
    const auto cells = voronoi_cells(dom, seeds);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      seeds[i] = polygon_geometry(cells[i]).centroid;
    }
  }
  return cells_to_mesh(dom, voronoi_cells(dom, seeds));
}

}  // namespace

Mesh gen_voronoi_polygons(const Rect& domain, std::vector<Vec2> seeds, int lloyd_iters) {
  VoronoiSetup dom;
  dom.is_rect = true;
  dom.rect = domain;
  dom.area = domain.width * domain.height;
  if (!(dom.area > 0.0)) throw std::invalid_argument("voronoi: empty rectangle");
  return generate(dom, std::move(seeds), lloyd_iters);
}

Mesh gen_voronoi_polygons(const Rect& domain, int n_seeds, const VoronoiOptions& opt) {
  std::mt19937_64 rng(opt.rng_seed);
  std::uniform_real_distribution<double> ux(domain.x0, domain.x1());
  std::uniform_real_distribution<double> uy(domain.y0, domain.y1());
  std::vector<Vec2> seeds;
  seeds.reserve(static_cast<std::size_t>(n_seeds));
  for (int i = 0; i < n_seeds; ++i) seeds.emplace_back(ux(rng), uy(rng));
  return gen_voronoi_polygons(domain, std::move(seeds), opt.lloyd_iters);
}

Mesh gen_voronoi_polygons(const Annulus& domain, int n_seeds, const VoronoiOptions& opt) {
  if (!(domain.outer_radius > domain.inner_radius) || !(domain.inner_radius >= 0.0))
    throw std::invalid_argument("voronoi: bad annulus radii");
  VoronoiSetup dom;
  dom.is_rect = false;
  dom.ann = domain;
  const double a = domain.inner_radius, b = domain.outer_radius;
  dom.area = M_PI * (b * b - a * a);

  std::mt19937_64 rng(opt.rng_seed);
  std::uniform_real_distribution<double> uu(0.0, 1.0);
  std::vector<Vec2> seeds;
  seeds.reserve(static_cast<std::size_t>(n_seeds));
  for (int i = 0; i < n_seeds; ++i) {
    const double r = std::sqrt(a * a + uu(rng) * (b * b - a * a));
    const double t = 2.0 * M_PI * uu(rng);
    seeds.emplace_back(r * std::cos(t), r * std::sin(t));
  }
  return generate(dom, std::move(seeds), opt.lloyd_iters);
}

}  // namespace pfem
