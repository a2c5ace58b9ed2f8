#pragma once

#include "pfem/accel.hpp"
#include "pfem/element.hpp"
#include "pfem/mesh.hpp"

#include <Eigen/Sparse>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pfem {

struct BoundaryCondition {
  enum class Kind { dirichlet_temperature, flux, convection, dirichlet_displacement };
  Kind kind;
  std::string target;  // node set for Dirichlet, edge set for flux/convection
  double value = 0.0;  // prescribed temperature, or flux q
  double g = 0.0;      // convection coefficient
  double phi_inf = 0.0;

  std::optional<double> ux, uy;  // prescribed displacement components

  static BoundaryCondition dirichlet_temperature(std::string target, double phi);
  static BoundaryCondition flux(std::string target, double q);
  static BoundaryCondition convection(std::string target, double g, double phi_inf);
  static BoundaryCondition dirichlet_displacement(std::string target, std::optional<double> ux,
                                                  std::optional<double> uy);
};

using SparseMat = Eigen::SparseMatrix<double>;

struct GlobalSystem {
  int n = 0;        // node count
  SparseMat K_th;   // n x n, convection folded in
  SparseMat M_th;   // n x n
  SparseMat K_el;   // 2n x 2n
  SparseMat C_el;   // 2n x n
  Eigen::VectorXd f_th;  // flux + convection + source loads
  Eigen::VectorXd f_el;  // external mechanical loads (zero unless injected)
  CacheStats cache_stats;
};

struct AssemblyOptions {
  int quad_degree = 4;
  bool accel = false;
  double heat_source = 0.0;  // constant volumetric Q over the whole mesh
};

GlobalSystem assemble(const Mesh& mesh, std::span<const Material> materials,
                      std::span<const BoundaryCondition> bcs, const AssemblyOptions& opt = {});

// Prescribed values per dof (thermal dofs = node ids; displacement dofs =
// 2*node + component). Conflicting prescriptions throw.
struct DirichletMap {
  std::map<int, double> values;
  void set(int dof, double value);
};

DirichletMap thermal_dirichlet(const Mesh& mesh, std::span<const BoundaryCondition> bcs);
DirichletMap displacement_dirichlet(const Mesh& mesh, std::span<const BoundaryCondition> bcs);

// Elimination of constrained dofs: keeps symmetry, moves known values to the
// right-hand side, remembers how to scatter solutions back.
struct ReducedSystem {
  SparseMat A;
  Eigen::VectorXd b;
  std::vector<int> free_dofs;            // reduced index -> full dof
  Eigen::VectorXd prescribed;            // full-size, constrained entries set
  std::vector<signed char> constrained;  // full-size mask
  Eigen::VectorXd shift;                 // (A_full * prescribed) at free dofs

  Eigen::VectorXd expand(const Eigen::VectorXd& x_free) const;
  // Right-hand-side reduction for a new full-size b against the same matrix.
  Eigen::VectorXd reduce_rhs(const Eigen::VectorXd& b_full) const;
};

ReducedSystem apply_dirichlet(const SparseMat& A, const Eigen::VectorXd& b, const DirichletMap& bc);

// Sparse Cholesky (LLT) with a residual contract of 1e-10 relative; throws
// SolveError with a diagnostic when the matrix is not SPD or the residual
// contract fails.
Eigen::VectorXd linear_solve(const SparseMat& A, const Eigen::VectorXd& b);

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FieldState {
  double t = 0.0;
  Eigen::VectorXd phi;  // n
  Eigen::VectorXd u;    // 2n
};

struct TransientConfig {
  double dt = 0.0;
  int n_steps = 0;
  Eigen::VectorXd phi0;  // size n, or empty = zero
};

// Two-step solve: K_th phi = f_th, then K_el u = f_el - C_el phi. An empty
// displacement map means a thermal-only analysis: the mechanical stage is
// skipped and u stays zero (with constraints present but insufficient, the
// solve reports the free rigid-body mode instead).
FieldState solve_steady(const GlobalSystem& sys, const DirichletMap& thermal_bc,
                        const DirichletMap& displacement_bc);

// Backward Euler: (K_th + M_th/dt) phi_new = f_th + (M_th/dt) phi_old, with the
// quasi-static mechanical solve repeated from each step's temperature.
// Returns states at t = dt, 2 dt, ..., n dt.
std::vector<FieldState> solve_transient(const GlobalSystem& sys, const DirichletMap& thermal_bc,
                                        const DirichletMap& displacement_bc,
                                        const TransientConfig& config);

}  // namespace pfem
