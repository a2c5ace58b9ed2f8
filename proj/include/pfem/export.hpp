#pragma once

#include "pfem/mesh.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace pfem {

// Legacy ASCII VTK unstructured grid; every element written as cell type 7
// (polygon). Temperature as POINT_DATA scalars, displacement as vectors,
// optional per-element stress (xx, yy, xy) as CELL_DATA.
void write_vtk(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& phi,
               const Eigen::VectorXd& u,
               const std::vector<Eigen::Vector3d>* cell_stress = nullptr);

// Minimal CSV writer: header row + numeric rows, '%.17g' formatting so
// re-running a config reproduces byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();
  void row(const std::vector<double>& values);
  void row_raw(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace pfem
