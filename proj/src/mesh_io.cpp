#include "pfem/mesh.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pfem {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::runtime_error("mesh parse error (" + origin + "): " + what);
}

}  // namespace

Mesh parse_mesh(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, e.what());
  }
  if (!j.is_object()) fail(origin, "top level must be an object");
  for (const char* key : {"nodes", "elements"}) {
    if (!j.contains(key)) fail(origin, std::string("missing section \"") + key + "\"");
  }

  Mesh mesh;
  try {
    for (const auto& n : j.at("nodes")) {
      if (!n.is_array() || n.size() != 2) fail(origin, "node entries must be [x, y]");
      mesh.nodes.push_back({n[0].get<double>(), n[1].get<double>()});
    }
    for (const auto& e : j.at("elements")) {
      PolyElement el;
      el.nodes = e.at("nodes").get<std::vector<int>>();
      el.material = e.value("material", 0);
      mesh.elements.push_back(std::move(el));
    }
    if (j.contains("node_sets")) {
      for (const auto& [name, ids] : j.at("node_sets").items())
        mesh.node_sets[name] = ids.get<std::vector<int>>();
    }
    if (j.contains("edge_sets")) {
      for (const auto& [name, edges] : j.at("edge_sets").items()) {
        std::vector<EdgePair> list;
        for (const auto& pair : edges) {
          if (!pair.is_array() || pair.size() != 2) fail(origin, "edge set entries must be [a, b]");
          list.emplace_back(pair[0].get<int>(), pair[1].get<int>());
        }
        mesh.edge_sets[name] = std::move(list);
      }
    }
  } catch (const json::exception& e) {
    fail(origin, e.what());
  }

  // Reject structurally broken meshes at load time; CW winding in particular.
  auto report = validate(mesh);
  if (!report.ok()) {
    fail(origin, report.summary());
  }
  return mesh;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mesh(buf.str(), path);
}

std::string mesh_to_json(const Mesh& mesh) {
  json j;
  j["nodes"] = json::array();
  for (const auto& n : mesh.nodes) j["nodes"].push_back({n.x, n.y});
  j["elements"] = json::array();
  for (const auto& e : mesh.elements) {
    j["elements"].push_back({{"nodes", e.nodes}, {"material", e.material}});
  }
  j["node_sets"] = json::object();
  for (const auto& [name, ids] : mesh.node_sets) j["node_sets"][name] = ids;
  j["edge_sets"] = json::object();
  for (const auto& [name, edges] : mesh.edge_sets) {
    json list = json::array();
    for (const auto& [a, b] : edges) list.push_back({a, b});
    j["edge_sets"][name] = std::move(list);
  }
  return j.dump(1);
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file: " + path);
  out << mesh_to_json(mesh) << "\n";
}

}  // namespace pfem
