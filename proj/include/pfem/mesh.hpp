#pragma once

#include "pfem/geom.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pfem {

// Node ids are dense: a node's id is its index in Mesh::nodes.
struct Node {
  double x = 0.0, y = 0.0;
  Vec2 pos() const { return {x, y}; }
};

// Convex polygon, 3..12 vertices in CCW order.
struct PolyElement {
  std::vector<int> nodes;
  int material = 0;
};

using EdgePair = std::pair<int, int>;

struct Mesh {
  std::vector<Node> nodes;
  std::vector<PolyElement> elements;
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<EdgePair>> edge_sets;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }
  Vec2 point(int i) const { return nodes[static_cast<std::size_t>(i)].pos(); }
  std::vector<Vec2> element_polygon(int e) const;

  // Edges referenced by exactly one element, keyed (min,max).
  std::vector<EdgePair> boundary_edges() const;
};

constexpr int kMaxPolygonVertices = 12;

struct Violation {
  enum class Kind {
    bad_coordinate,
    dangling_id,
    repeated_id,
    vertex_count,
    cw_winding,
    non_convex,
    degenerate,
    nonconforming_edge,
    hanging_node,
    bad_set,
  };
  Kind kind;
  int index = -1;  // element or node index when applicable
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const Mesh& mesh);

PolygonGeometry element_geometry(const Mesh& mesh, int element);

// --- Generators ------------------------------------------------------------

// (nx+1)*(ny+1) nodes, nx*ny CCW quads; node and edge sets
// "left"/"right"/"bottom"/"top" on the rectangle boundary.
Mesh gen_structured_quads(double width, double height, int nx, int ny);

struct RefineRegion {
  Rect box;
  int depth = 1;  // target depth relative to the base cells
};

// Balanced quadtree forest over a base grid of square cells. Hanging nodes
// are promoted to polygon vertices, so leaves come out with 4-8 vertices.
// Base cells must be square (width/nx == height/ny).
Mesh gen_quadtree(const Rect& domain, int base_nx, int base_ny,
                  std::span<const RefineRegion> refine, int max_depth = 10);

struct Annulus {
  double inner_radius = 0.0;
  double outer_radius = 0.0;  // centered at the origin
};

struct VoronoiOptions {
  int lloyd_iters = 50;
  std::uint64_t rng_seed = 1;
};

// Lloyd-relaxed clipped Voronoi diagrams. Boundary sets: rectangle domains get
// left/right/bottom/top, annulus domains get inner/outer.
Mesh gen_voronoi_polygons(const Rect& domain, int n_seeds, const VoronoiOptions& opt = {});
Mesh gen_voronoi_polygons(const Annulus& domain, int n_seeds, const VoronoiOptions& opt = {});
// Deterministic variant with caller-provided seed points.
Mesh gen_voronoi_polygons(const Rect& domain, std::vector<Vec2> seeds, int lloyd_iters);

// Keeps the listed elements, drops orphan nodes, filters sets.
Mesh submesh(const Mesh& mesh, std::span<const int> keep_elements);

// --- File I/O ---------------------------------------------------------------
// JSON text: {"nodes":[[x,y],...],"elements":[{"nodes":[...],"material":0},...],
//             "node_sets":{...},"edge_sets":{...}}. Indices 0-based, CCW winding.

Mesh load_mesh(const std::string& path);
Mesh parse_mesh(const std::string& text, const std::string& origin = "<string>");
void save_mesh(const Mesh& mesh, const std::string& path);
std::string mesh_to_json(const Mesh& mesh);

}  // namespace pfem
