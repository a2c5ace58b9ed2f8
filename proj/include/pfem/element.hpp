#pragma once

#include "pfem/quadrature.hpp"
#include "pfem/wachspress.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace pfem {

enum class Plane { stress, strain };

struct Material {
  double E = 1.0;       // Young's modulus
  double nu = 0.0;      // Poisson ratio
  double alpha = 0.0;   // thermal expansion
  double kx = 1.0;      // conductivity, x
  double ky = 1.0;      // conductivity, y
  double rho = 1.0;     // density
  double c = 1.0;       // specific heat
  Plane plane = Plane::stress;
  double thickness = 1.0;

  void check() const;  // throws std::invalid_argument on out-of-range values

  Eigen::Matrix3d elastic_matrix() const;  // D, Voigt (xx, yy, xy)
  // Thermal strain per unit temperature: beta, with the (1+nu) factor folded
  // in under plane strain.
  Eigen::Vector3d thermal_strain_coeff() const;
};

struct ElementMatrices {
  Eigen::MatrixXd K_th;  // m x m
  Eigen::MatrixXd M_th;  // m x m
  Eigen::MatrixXd K_el;  // 2m x 2m
  Eigen::MatrixXd C_el;  // 2m x m; mechanical rhs is f - C_el * phi
};

// Shared per-element evaluation: quadrature, shape values and quadrature-
// consistent gradients. The raw Wachspress gradients are rational, so a fixed
// triangle rule does not integrate them exactly; each gradient gets the
// constant per-element correction that restores Q[grad N_i] = closed-form
// boundary integral of N_i. That keeps linear fields exact through assembly
// (patch test) independent of the quadrature degree.
struct ElementEvaluation {
  PolyQuadrature quad;
  Eigen::MatrixXd N;        // q x m
  Eigen::MatrixXd dNdx;     // q x m, corrected
  Eigen::MatrixXd dNdy;     // q x m, corrected
};

ElementEvaluation evaluate_element(const PolygonBasis& basis, int quad_degree);

ElementMatrices matrices_from_evaluation(const ElementEvaluation& ev, const Material& mat);

ElementMatrices element_matrices(std::span<const Vec2> poly, const Material& mat, int quad_degree = 4);

Eigen::MatrixXd k_thermal(std::span<const Vec2> poly, const Material& mat, int quad_degree = 4);
Eigen::MatrixXd m_thermal(std::span<const Vec2> poly, const Material& mat, int quad_degree = 4);
Eigen::MatrixXd k_elastic(std::span<const Vec2> poly, const Material& mat, int quad_degree = 4);
Eigen::MatrixXd c_coupling(std::span<const Vec2> poly, const Material& mat, int quad_degree = 4);

// Boundary contributions on a 2-node edge (linear shape traces).
struct ConvectionEdge {
  Eigen::Matrix2d K;  // g * t * (L/6) [[2,1],[1,2]]
  Eigen::Vector2d f;  // g * t * phi_inf * L/2 per node
};
ConvectionEdge convection_edge(const Vec2& a, const Vec2& b, double g, double phi_inf,
                               double thickness = 1.0);
// Prescribed outward flux q: f_i = -q * t * L/2 per node.
Eigen::Vector2d flux_edge(const Vec2& a, const Vec2& b, double q, double thickness = 1.0);
// Constant volumetric source Q: f_i = Q * t * integral(N_i).
Eigen::VectorXd source_load(std::span<const Vec2> poly, double Q, double thickness = 1.0,
                            int quad_degree = 4);

struct StressSample {
  Vec2 point;
  Eigen::Vector3d strain;
  Eigen::Vector3d thermal_strain;
  Eigen::Vector3d stress;
  double weight;  // quadrature weight, for area averaging
};

struct StressRecovery {
  std::vector<StressSample> samples;
  Eigen::Vector3d average;  // area-weighted
};

StressRecovery stress_recover(std::span<const Vec2> poly, const Material& mat,
                              const Eigen::VectorXd& phi_e, const Eigen::VectorXd& u_e,
                              int quad_degree = 4);

}  // namespace pfem
