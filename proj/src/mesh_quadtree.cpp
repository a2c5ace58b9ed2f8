#include "pfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>

namespace pfem {

namespace {

// Cells live on an integer lattice: the base cell side is 2^Dmax units, a
// depth-d cell has side 2^(Dmax-d). Shared corners and mid-edge points are
// exact by construction.
struct QNode {
  std::int64_t x = 0, y = 0;  // lower-left corner, lattice units
  std::int64_t size = 0;
  int depth = 0;
  int child0 = -1;  // children are contiguous: child0 .. child0+3 (SW,SE,NW,NE)
  bool leaf() const { return child0 < 0; }
};

struct Forest {
  std::vector<QNode> nodes;
  std::vector<int> roots;  // row-major base grid
  int base_nx = 0, base_ny = 0;
  std::int64_t root_size = 0;

  int find_leaf(std::int64_t px, std::int64_t py) const {
    if (px < 0 || py < 0) return -1;
    const std::int64_t ix = px / root_size;
    const std::int64_t iy = py / root_size;
    if (ix >= base_nx || iy >= base_ny) return -1;
    int cur = roots[static_cast<std::size_t>(iy) * base_nx + static_cast<std::size_t>(ix)];
    while (!nodes[static_cast<std::size_t>(cur)].leaf()) {
      const QNode& n = nodes[static_cast<std::size_t>(cur)];
      const std::int64_t half = n.size / 2;
      const int qx = px >= n.x + half ? 1 : 0;
      const int qy = py >= n.y + half ? 1 : 0;
      cur = n.child0 + qy * 2 + qx;
    }
    return cur;
  }

  void split(int id) {
    QNode& n = nodes[static_cast<std::size_t>(id)];
    const std::int64_t h = n.size / 2;
    const int c0 = static_cast<int>(nodes.size());
    const std::int64_t x = n.x, y = n.y;
    const int d = n.depth + 1;
    n.child0 = c0;
    nodes.push_back({x, y, h, d, -1});
    nodes.push_back({x + h, y, h, d, -1});
    nodes.push_back({x, y + h, h, d, -1});
    nodes.push_back({x + h, y + h, h, d, -1});
  }
};

}  // namespace

Mesh gen_quadtree(const Rect& domain, int base_nx, int base_ny,
                  std::span<const RefineRegion> refine, int max_depth) {
  if (!(domain.width > 0.0) || !(domain.height > 0.0))
    throw std::invalid_argument("non-positive domain");
  if (base_nx < 1 || base_ny < 1) throw std::invalid_argument("base grid must be at least 1x1");
  const double s = domain.width / base_nx;
  if (std::abs(domain.height / base_ny - s) > 1e-9 * s)
    throw std::invalid_argument("quadtree base cells must be square");

  int deepest = 0;
  for (const auto& r : refine) {
    if (r.depth < 0 || r.depth > max_depth)
      throw std::invalid_argument("refine depth exceeds max_depth");
    const double ox = std::min(domain.x1(), r.box.x1()) - std::max(domain.x0, r.box.x0);
    const double oy = std::min(domain.y1(), r.box.y1()) - std::max(domain.y0, r.box.y0);
    if (ox <= 0.0 || oy <= 0.0) throw std::invalid_argument("refine region outside domain");
    deepest = std::max(deepest, r.depth);
  }

  Forest f;
  f.base_nx = base_nx;
  f.base_ny = base_ny;
  f.root_size = std::int64_t{1} << deepest;
  const double unit = s / static_cast<double>(f.root_size);
  for (int j = 0; j < base_ny; ++j) {
    for (int i = 0; i < base_nx; ++i) {
      f.roots.push_back(static_cast<int>(f.nodes.size()));
      f.nodes.push_back({i * f.root_size, j * f.root_size, f.root_size, 0, -1});
    }
  }

  // Refinement: split every leaf overlapping a region until it reaches the
  // region's depth.
  auto to_world = [&](std::int64_t v, double origin) { return origin + static_cast<double>(v) * unit; };
  for (const auto& r : refine) {
    std::deque<int> work(f.roots.begin(), f.roots.end());
    while (!work.empty()) {
      const int id = work.front();
      work.pop_front();
      const QNode n = f.nodes[static_cast<std::size_t>(id)];
      const double cx0 = to_world(n.x, domain.x0), cy0 = to_world(n.y, domain.y0);
      const double cx1 = to_world(n.x + n.size, domain.x0), cy1 = to_world(n.y + n.size, domain.y0);
      const double eps = 1e-12 * s;
      const bool overlaps = std::min(cx1, r.box.x1()) - std::max(cx0, r.box.x0) > eps &&
                            std::min(cy1, r.box.y1()) - std::max(cy0, r.box.y0) > eps;
      if (!overlaps) continue;
      if (!f.nodes[static_cast<std::size_t>(id)].leaf()) {
        for (int k = 0; k < 4; ++k) work.push_back(f.nodes[static_cast<std::size_t>(id)].child0 + k);
        continue;
      }
      if (n.depth < r.depth) {
        f.split(id);
        for (int k = 0; k < 4; ++k) work.push_back(f.nodes[static_cast<std::size_t>(id)].child0 + k);
      }
    }
  }

  // 2:1 balance: a leaf may not have an edge neighbor more than one level
  // coarser. Splitting a neighbor can cascade, so keep a worklist.
  {
    std::deque<int> work;
    for (std::size_t i = 0; i < f.nodes.size(); ++i)
      if (f.nodes[i].leaf()) work.push_back(static_cast<int>(i));
    while (!work.empty()) {
      const int id = work.front();
      work.pop_front();
      if (!f.nodes[static_cast<std::size_t>(id)].leaf()) continue;
      const QNode n = f.nodes[static_cast<std::size_t>(id)];
      if (n.depth <= 1) continue;
      // Probe one point just across each edge, at both edge ends.
      const std::int64_t probes[8][2] = {
          {n.x, n.y - 1},          {n.x + n.size - 1, n.y - 1},           // below
          {n.x, n.y + n.size},     {n.x + n.size - 1, n.y + n.size},      // above
          {n.x - 1, n.y},          {n.x - 1, n.y + n.size - 1},           // left
          {n.x + n.size, n.y},     {n.x + n.size, n.y + n.size - 1},      // right
      };
      for (const auto& p : probes) {
        const int nb = f.find_leaf(p[0], p[1]);
        if (nb < 0) continue;
        if (f.nodes[static_cast<std::size_t>(nb)].depth < n.depth - 1) {
          f.split(nb);
          for (int k = 0; k < 4; ++k) work.push_back(f.nodes[static_cast<std::size_t>(nb)].child0 + k);
          work.push_back(id);  // recheck against the new, finer neighbors
          break;
        }
      }
    }
  }

  // Leaves in deterministic order: roots row-major, children SW,SE,NW,NE.
  std::vector<int> leaves;
  {
    std::vector<int> stack(f.roots.rbegin(), f.roots.rend());
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      const QNode& n = f.nodes[static_cast<std::size_t>(id)];
      if (n.leaf()) {
        leaves.push_back(id);
      } else {
        for (int k = 3; k >= 0; --k) stack.push_back(n.child0 + k);
      }
    }
  }

  // Corner registry; node ids renumbered bottom-to-top, left-to-right at the
  // end so the unrefined case matches gen_structured_quads exactly.
  std::map<std::pair<std::int64_t, std::int64_t>, int> corner_id;
  for (int id : leaves) {
    const QNode& n = f.nodes[static_cast<std::size_t>(id)];
    for (const auto& [dx, dy] : std::initializer_list<std::pair<std::int64_t, std::int64_t>>{
             {0, 0}, {n.size, 0}, {n.size, n.size}, {0, n.size}}) {
      corner_id.emplace(std::make_pair(n.x + dx, n.y + dy), 0);
    }
  }
  {
    int next = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> keys;
    keys.reserve(corner_id.size());
    for (const auto& [k, v] : corner_id) keys.push_back(k);
    std::sort(keys.begin(), keys.end(),
              [](const auto& a, const auto& b) { return a.second != b.second ? a.second < b.second : a.first < b.first; });
    for (const auto& k : keys) corner_id[k] = next++;
  }

  Mesh mesh;
  mesh.nodes.resize(corner_id.size());
  for (const auto& [key, id] : corner_id) {
    mesh.nodes[static_cast<std::size_t>(id)] = {to_world(key.first, domain.x0), to_world(key.second, domain.y0)};
  }

  auto lookup = [&](std::int64_t x, std::int64_t y) -> int {
    auto it = corner_id.find({x, y});
    return it == corner_id.end() ? -1 : it->second;
  };

  for (int id : leaves) {
    const QNode& n = f.nodes[static_cast<std::size_t>(id)];
    const std::int64_t h = n.size / 2;
    PolyElement el;
    auto push = [&](std::int64_t x, std::int64_t y) { el.nodes.push_back(lookup(x, y)); };
    auto push_mid = [&](std::int64_t x, std::int64_t y) {
      if (n.size < 2) return;
      const int mid = lookup(x, y);
      if (mid >= 0) el.nodes.push_back(mid);
    };
    push(n.x, n.y);
    push_mid(n.x + h, n.y);
    push(n.x + n.size, n.y);
    push_mid(n.x + n.size, n.y + h);
    push(n.x + n.size, n.y + n.size);
    push_mid(n.x + h, n.y + n.size);
    push(n.x, n.y + n.size);
    push_mid(n.x, n.y + h);
    mesh.elements.push_back(std::move(el));
  }

  // Boundary sets by exact lattice coordinates.
  const std::int64_t X = base_nx * f.root_size;
  const std::int64_t Y = base_ny * f.root_size;
  for (const auto& [key, id] : corner_id) {
    if (key.first == 0) mesh.node_sets["left"].push_back(id);
    if (key.first == X) mesh.node_sets["right"].push_back(id);
    if (key.second == 0) mesh.node_sets["bottom"].push_back(id);
    if (key.second == Y) mesh.node_sets["top"].push_back(id);
  }
  for (auto& [name, ids] : mesh.node_sets) std::sort(ids.begin(), ids.end());

  struct SideEdge {
    std::int64_t pos;
    EdgePair edge;
  };
  std::map<std::string, std::vector<SideEdge>> sides;
  for (int id : leaves) {
    const QNode& n = f.nodes[static_cast<std::size_t>(id)];
    if (n.y == 0) sides["bottom"].push_back({n.x, {lookup(n.x, 0), lookup(n.x + n.size, 0)}});
    if (n.y + n.size == Y) sides["top"].push_back({n.x, {lookup(n.x, Y), lookup(n.x + n.size, Y)}});
    if (n.x == 0) sides["left"].push_back({n.y, {lookup(0, n.y), lookup(0, n.y + n.size)}});
    if (n.x + n.size == X) sides["right"].push_back({n.y, {lookup(X, n.y), lookup(X, n.y + n.size)}});
  }
  for (auto& [name, list] : sides) {
    std::sort(list.begin(), list.end(), [](const SideEdge& a, const SideEdge& b) { return a.pos < b.pos; });
    auto& out = mesh.edge_sets[name];
    for (const auto& se : list) out.push_back(se.edge);
  }
  return mesh;
}

}  // namespace pfem
