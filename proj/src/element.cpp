#include "pfem/element.hpp"

#include <cmath>
#include <stdexcept>

namespace pfem {

void Material::check() const {
  if (!(E > 0.0)) throw std::invalid_argument("material: E must be positive");
  if (!(nu > -1.0 && nu < 0.5)) throw std::invalid_argument("material: nu must be in (-1, 0.5)");
  if (!(kx > 0.0) || !(ky > 0.0)) throw std::invalid_argument("material: conductivities must be positive");
  if (!(rho > 0.0) || !(c > 0.0)) throw std::invalid_argument("material: rho and c must be positive");
  if (!(thickness > 0.0)) throw std::invalid_argument("material: thickness must be positive");
}

Eigen::Matrix3d Material::elastic_matrix() const {
  Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
  if (plane == Plane::stress) {
    const double f = E / (1.0 - nu * nu);
    D(0, 0) = D(1, 1) = f;
    D(0, 1) = D(1, 0) = f * nu;
    D(2, 2) = f * (1.0 - nu) / 2.0;
  } else {
    const double f = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    D(0, 0) = D(1, 1) = f * (1.0 - nu);
    D(0, 1) = D(1, 0) = f * nu;
    D(2, 2) = f * (1.0 - 2.0 * nu) / 2.0;
  }
  return D;
}

Eigen::Vector3d Material::thermal_strain_coeff() const {
  const double scale = plane == Plane::strain ? (1.0 + nu) * alpha : alpha;
  return {scale, scale, 0.0};
}

ElementEvaluation evaluate_element(const PolygonBasis& basis, int quad_degree) {
  const auto& verts = basis.vertices();
  const int m = basis.size();
  ElementEvaluation ev;
  ev.quad = polygon_rule(verts, quad_degree);
  const int q = static_cast<int>(ev.quad.points.size());
  ev.N.resize(q, m);
  ev.dNdx.resize(q, m);
  ev.dNdy.resize(q, m);
  for (int p = 0; p < q; ++p) {
    const ShapeEval se = basis.eval(ev.quad.points[static_cast<std::size_t>(p)].x, true);
    ev.N.row(p) = se.N.transpose();
    ev.dNdx.row(p) = se.grad.col(0).transpose();
    ev.dNdy.row(p) = se.grad.col(1).transpose();
  }

  // Gradient correction: shift each grad N_i by the constant that makes its
  // quadrature match the exact boundary integral (edge traces are linear, so
  // integral(grad N_i) = sum of L*n/2 over the two incident edges).
  Eigen::VectorXd qx = Eigen::VectorXd::Zero(m), qy = Eigen::VectorXd::Zero(m);
  for (int p = 0; p < q; ++p) {
    const double w = ev.quad.points[static_cast<std::size_t>(p)].w;
    qx += w * ev.dNdx.row(p).transpose();
    qy += w * ev.dNdy.row(p).transpose();
  }
  Eigen::VectorXd bx = Eigen::VectorXd::Zero(m), by = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    const int j = (i + 1) % m;
    const Vec2 e = verts[static_cast<std::size_t>(j)] - verts[static_cast<std::size_t>(i)];
    const Vec2 half_ln = 0.5 * Vec2(e.y(), -e.x());  // L * n / 2
    bx[i] += half_ln.x();
    by[i] += half_ln.y();
    bx[j] += half_ln.x();
    by[j] += half_ln.y();
  }
  const Eigen::RowVectorXd cx = (bx - qx).transpose() / ev.quad.area;
  const Eigen::RowVectorXd cy = (by - qy).transpose() / ev.quad.area;
  ev.dNdx.rowwise() += cx;
  ev.dNdy.rowwise() += cy;
  return ev;
}

ElementMatrices matrices_from_evaluation(const ElementEvaluation& ev, const Material& mat) {
  const int m = static_cast<int>(ev.N.cols());
  const int q = static_cast<int>(ev.N.rows());
  const double t = mat.thickness;

  ElementMatrices out;
  out.K_th = Eigen::MatrixXd::Zero(m, m);
  out.M_th = Eigen::MatrixXd::Zero(m, m);
  out.K_el = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  out.C_el = Eigen::MatrixXd::Zero(2 * m, m);

  const Eigen::Matrix3d D = mat.elastic_matrix();
  const Eigen::Vector3d beta = mat.thermal_strain_coeff();
  const Eigen::Vector3d Dbeta = D * beta;

  Eigen::MatrixXd B(3, 2 * m);
  for (int p = 0; p < q; ++p) {
    const double w = ev.quad.points[static_cast<std::size_t>(p)].w * t;
    const auto gx = ev.dNdx.row(p);
    const auto gy = ev.dNdy.row(p);
    const auto N = ev.N.row(p);

    out.K_th.noalias() += w * (mat.kx * gx.transpose() * gx + mat.ky * gy.transpose() * gy);
    out.M_th.noalias() += (w * mat.rho * mat.c) * N.transpose() * N;

    B.setZero();
    for (int i = 0; i < m; ++i) {
      B(0, 2 * i) = gx[i];
      B(1, 2 * i + 1) = gy[i];
      B(2, 2 * i) = gy[i];
      B(2, 2 * i + 1) = gx[i];
    }
    out.K_el.noalias() += w * B.transpose() * D * B;
    out.C_el.noalias() -= w * B.transpose() * Dbeta * N;
  }

  // Assemble exactly symmetric halves.
  out.K_th = 0.5 * (out.K_th + out.K_th.transpose()).eval();
  out.M_th = 0.5 * (out.M_th + out.M_th.transpose()).eval();
  out.K_el = 0.5 * (out.K_el + out.K_el.transpose()).eval();
  return out;
}

ElementMatrices element_matrices(std::span<const Vec2> poly, const Material& mat, int quad_degree) {
  mat.check();
  PolygonBasis basis(std::vector<Vec2>(poly.begin(), poly.end()));
  return matrices_from_evaluation(evaluate_element(basis, quad_degree), mat);
}

Eigen::MatrixXd k_thermal(std::span<const Vec2> poly, const Material& mat, int quad_degree) {
  return element_matrices(poly, mat, quad_degree).K_th;
}
Eigen::MatrixXd m_thermal(std::span<const Vec2> poly, const Material& mat, int quad_degree) {
  return element_matrices(poly, mat, quad_degree).M_th;
}
Eigen::MatrixXd k_elastic(std::span<const Vec2> poly, const Material& mat, int quad_degree) {
  return element_matrices(poly, mat, quad_degree).K_el;
}
Eigen::MatrixXd c_coupling(std::span<const Vec2> poly, const Material& mat, int quad_degree) {
  return element_matrices(poly, mat, quad_degree).C_el;
}

ConvectionEdge convection_edge(const Vec2& a, const Vec2& b, double g, double phi_inf, double thickness) {
  const double L = (b - a).norm();
  if (!(L > 0.0)) throw std::invalid_argument("convection_edge: zero-length edge");
  ConvectionEdge out;
  out.K << 2, 1, 1, 2;
  out.K *= g * thickness * L / 6.0;
  out.f.setConstant(g * thickness * phi_inf * L / 2.0);
  return out;
}

Eigen::Vector2d flux_edge(const Vec2& a, const Vec2& b, double q, double thickness) {
  const double L = (b - a).norm();
  if (!(L > 0.0)) throw std::invalid_argument("flux_edge: zero-length edge");
  return Eigen::Vector2d::Constant(-q * thickness * L / 2.0);
}

Eigen::VectorXd source_load(std::span<const Vec2> poly, double Q, double thickness, int quad_degree) {
  PolygonBasis basis(std::vector<Vec2>(poly.begin(), poly.end()));
  Eigen::VectorXd f = Eigen::VectorXd::Zero(basis.size());
  const auto quad = polygon_rule(basis.vertices(), quad_degree);
  for (const auto& qp : quad.points) {
    f += (qp.w * Q * thickness) * basis.eval(qp.x, false).N;
  }
  return f;
}

StressRecovery stress_recover(std::span<const Vec2> poly, const Material& mat,
                              const Eigen::VectorXd& phi_e, const Eigen::VectorXd& u_e,
                              int quad_degree) {
  mat.check();
  PolygonBasis basis(std::vector<Vec2>(poly.begin(), poly.end()));
  const auto ev = evaluate_element(basis, quad_degree);
  const int m = basis.size();
  if (phi_e.size() != m || u_e.size() != 2 * m)
    throw std::invalid_argument("stress_recover: field size mismatch");

  const Eigen::Matrix3d D = mat.elastic_matrix();
  const Eigen::Vector3d beta = mat.thermal_strain_coeff();

  StressRecovery out;
  out.average.setZero();
  double wsum = 0.0;
  for (int p = 0; p < static_cast<int>(ev.N.rows()); ++p) {
    StressSample s;
    s.point = ev.quad.points[static_cast<std::size_t>(p)].x;
    s.weight = ev.quad.points[static_cast<std::size_t>(p)].w;
    s.strain.setZero();
    for (int i = 0; i < m; ++i) {
      s.strain[0] += ev.dNdx(p, i) * u_e[2 * i];
      s.strain[1] += ev.dNdy(p, i) * u_e[2 * i + 1];
      s.strain[2] += ev.dNdy(p, i) * u_e[2 * i] + ev.dNdx(p, i) * u_e[2 * i + 1];
    }
    const double phi = ev.N.row(p).dot(phi_e);
    s.thermal_strain = phi * beta;
    s.stress = D * (s.strain - s.thermal_strain);
    out.average += s.weight * s.stress;
    wsum += s.weight;
    out.samples.push_back(std::move(s));
  }
  out.average /= wsum;
  return out;
}

}  // namespace pfem
