#include "pfem/export.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pfem {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_vtk(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& phi,
               const Eigen::VectorXd& u, const std::vector<Eigen::Vector3d>* cell_stress) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write VTK file: " + path);

  const int n = mesh.node_count();
  out << "# vtk DataFile Version 3.0\n";
  out << "pfem fields\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (const auto& nd : mesh.nodes) out << num(nd.x) << " " << num(nd.y) << " 0\n";

  std::size_t list_len = 0;
  for (const auto& el : mesh.elements) list_len += el.nodes.size() + 1;
  out << "CELLS " << mesh.element_count() << " " << list_len << "\n";
  for (const auto& el : mesh.elements) {
    out << el.nodes.size();
    for (int id : el.nodes) out << " " << id;
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.element_count() << "\n";
  for (int e = 0; e < mesh.element_count(); ++e) out << "7\n";  // VTK_POLYGON

  out << "POINT_DATA " << n << "\n";
  if (phi.size() == n) {
    out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) out << num(phi[i]) << "\n";
  }
  if (u.size() == 2 * n) {
    out << "VECTORS displacement double\n";
    for (int i = 0; i < n; ++i) out << num(u[2 * i]) << " " << num(u[2 * i + 1]) << " 0\n";
  }
  if (cell_stress && static_cast<int>(cell_stress->size()) == mesh.element_count()) {
    out << "CELL_DATA " << mesh.element_count() << "\n";
    const char* names[3] = {"stress_xx", "stress_yy", "stress_xy"};
    for (int c = 0; c < 3; ++c) {
      out << "SCALARS " << names[c] << " double 1\nLOOKUP_TABLE default\n";
      for (const auto& s : *cell_stress) out << num(s[c]) << "\n";
    }
  }
}

struct CsvWriter::Impl {
  std::ofstream out;
  std::size_t columns = 0;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    throw std::runtime_error("cannot write CSV file: " + path);
  }
  impl_->columns = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    impl_->out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != impl_->columns) throw std::runtime_error("CSV row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    impl_->out << num(values[i]) << (i + 1 < values.size() ? "," : "\n");
  }
}

void CsvWriter::row_raw(const std::string& line) { impl_->out << line << "\n"; }

}  // namespace pfem
