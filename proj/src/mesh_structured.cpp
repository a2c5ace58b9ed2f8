#include "pfem/mesh.hpp"

#include <stdexcept>

namespace pfem {

Mesh gen_structured_quads(double width, double height, int nx, int ny) {
  if (!(width > 0.0) || !(height > 0.0)) throw std::invalid_argument("non-positive dimensions");
  if (nx < 1 || ny < 1) throw std::invalid_argument("nx and ny must be >= 1");

  Mesh mesh;
  mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.nodes.push_back({width * i / nx, height * j / ny});
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

  mesh.elements.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      PolyElement el;
      el.nodes = {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)};
      mesh.elements.push_back(std::move(el));
    }
  }

  auto& left = mesh.node_sets["left"];
  auto& right = mesh.node_sets["right"];
  for (int j = 0; j <= ny; ++j) {
    left.push_back(id(0, j));
    right.push_back(id(nx, j));
  }
  auto& bottom = mesh.node_sets["bottom"];
  auto& top = mesh.node_sets["top"];
  for (int i = 0; i <= nx; ++i) {
    bottom.push_back(id(i, 0));
    top.push_back(id(i, ny));
  }

  auto& eleft = mesh.edge_sets["left"];
  auto& eright = mesh.edge_sets["right"];
  for (int j = 0; j < ny; ++j) {
    eleft.emplace_back(id(0, j), id(0, j + 1));
    eright.emplace_back(id(nx, j), id(nx, j + 1));
  }
  auto& ebottom = mesh.edge_sets["bottom"];
  auto& etop = mesh.edge_sets["top"];
  for (int i = 0; i < nx; ++i) {
    ebottom.emplace_back(id(i, 0), id(i + 1, 0));
    etop.emplace_back(id(i, ny), id(i + 1, ny));
  }
  return mesh;
}

}  // namespace pfem
