#include "pfem/solver.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace pfem {

BoundaryCondition BoundaryCondition::dirichlet_temperature(std::string target, double phi) {
  BoundaryCondition bc;
  bc.kind = Kind::dirichlet_temperature;
  bc.target = std::move(target);
  bc.value = phi;
  return bc;
}

BoundaryCondition BoundaryCondition::flux(std::string target, double q) {
  BoundaryCondition bc;
  bc.kind = Kind::flux;
  bc.target = std::move(target);
  bc.value = q;
  return bc;
}

BoundaryCondition BoundaryCondition::convection(std::string target, double g, double phi_inf) {
  BoundaryCondition bc;
  bc.kind = Kind::convection;
  bc.target = std::move(target);
  bc.g = g;
  bc.phi_inf = phi_inf;
  return bc;
}

BoundaryCondition BoundaryCondition::dirichlet_displacement(std::string target,
                                                            std::optional<double> ux,
                                                            std::optional<double> uy) {
  BoundaryCondition bc;
  bc.kind = Kind::dirichlet_displacement;
  bc.target = std::move(target);
  bc.ux = ux;
  bc.uy = uy;
  return bc;
}

namespace {

const std::vector<int>& node_set(const Mesh& mesh, const std::string& name) {
  auto it = mesh.node_sets.find(name);
  if (it == mesh.node_sets.end())
    throw std::runtime_error("boundary condition target not found: node set '" + name + "'");
  return it->second;
}

const std::vector<EdgePair>& edge_set(const Mesh& mesh, const std::string& name) {
  auto it = mesh.edge_sets.find(name);
  if (it == mesh.edge_sets.end())
    throw std::runtime_error("boundary condition target not found: edge set '" + name + "'");
  return it->second;
}

}  // namespace

GlobalSystem assemble(const Mesh& mesh, std::span<const Material> materials,
                      std::span<const BoundaryCondition> bcs, const AssemblyOptions& opt) {
  const int n = mesh.node_count();
  GlobalSystem sys;
  sys.n = n;
  sys.f_th = Eigen::VectorXd::Zero(n);
  sys.f_el = Eigen::VectorXd::Zero(2 * n);

  // Validate BC targets up front so bad configs fail before the heavy work.
  for (const auto& bc : bcs) {
    if (bc.kind == BoundaryCondition::Kind::dirichlet_temperature ||
        bc.kind == BoundaryCondition::Kind::dirichlet_displacement) {
      node_set(mesh, bc.target);
    } else {
      edge_set(mesh, bc.target);
    }
  }

  using T = Eigen::Triplet<double>;
  std::vector<T> t_k, t_m, t_ke, t_ce;

  ParentCache cache(opt.quad_degree);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    if (el.material < 0 || el.material >= static_cast<int>(materials.size()))
      throw std::runtime_error("element " + std::to_string(e) + ": missing material " +
                               std::to_string(el.material));
    const Material& mat = materials[static_cast<std::size_t>(el.material)];
    const auto poly = mesh.element_polygon(e);

    ElementMatrices em;
    if (opt.accel) {
      auto cached = cache.scaled_matrices(poly, mat);
      em = cached ? std::move(*cached) : element_matrices(poly, mat, opt.quad_degree);
    } else {
      em = element_matrices(poly, mat, opt.quad_degree);
    }

    const int m = static_cast<int>(el.nodes.size());
    for (int i = 0; i < m; ++i) {
      const int gi = el.nodes[static_cast<std::size_t>(i)];
      for (int j = 0; j < m; ++j) {
        const int gj = el.nodes[static_cast<std::size_t>(j)];
        t_k.emplace_back(gi, gj, em.K_th(i, j));
        t_m.emplace_back(gi, gj, em.M_th(i, j));
        for (int a = 0; a < 2; ++a) {
          t_ce.emplace_back(2 * gi + a, gj, em.C_el(2 * i + a, j));
          for (int b = 0; b < 2; ++b)
            t_ke.emplace_back(2 * gi + a, 2 * gj + b, em.K_el(2 * i + a, 2 * j + b));
        }
      }
    }
    if (opt.heat_source != 0.0) {
      const auto f = source_load(poly, opt.heat_source, mat.thickness, opt.quad_degree);
      for (int i = 0; i < m; ++i) sys.f_th[el.nodes[static_cast<std::size_t>(i)]] += f[i];
    }
  }
  sys.cache_stats = cache.stats();

  // Boundary terms. Edge thickness comes from the first material; per-edge
  // material resolution is not needed for the supported benchmarks.
  const double edge_thickness = materials.empty() ? 1.0 : materials[0].thickness;
  for (const auto& bc : bcs) {
    if (bc.kind == BoundaryCondition::Kind::flux) {
      for (const auto& [a, b] : edge_set(mesh, bc.target)) {
        const auto f = flux_edge(mesh.point(a), mesh.point(b), bc.value, edge_thickness);
        sys.f_th[a] += f[0];
        sys.f_th[b] += f[1];
      }
    } else if (bc.kind == BoundaryCondition::Kind::convection) {
      for (const auto& [a, b] : edge_set(mesh, bc.target)) {
        const auto ce = convection_edge(mesh.point(a), mesh.point(b), bc.g, bc.phi_inf, edge_thickness);
        t_k.emplace_back(a, a, ce.K(0, 0));
        t_k.emplace_back(a, b, ce.K(0, 1));
        t_k.emplace_back(b, a, ce.K(1, 0));
        t_k.emplace_back(b, b, ce.K(1, 1));
        sys.f_th[a] += ce.f[0];
        sys.f_th[b] += ce.f[1];
      }
    }
  }

  sys.K_th.resize(n, n);
  sys.M_th.resize(n, n);
  sys.K_el.resize(2 * n, 2 * n);
  sys.C_el.resize(2 * n, n);
  sys.K_th.setFromTriplets(t_k.begin(), t_k.end());
  sys.M_th.setFromTriplets(t_m.begin(), t_m.end());
  sys.K_el.setFromTriplets(t_ke.begin(), t_ke.end());
  sys.C_el.setFromTriplets(t_ce.begin(), t_ce.end());
  return sys;
}

void DirichletMap::set(int dof, double value) {
  auto [it, inserted] = values.emplace(dof, value);
  if (!inserted && it->second != value) {
    throw std::runtime_error("conflicting Dirichlet prescriptions on dof " + std::to_string(dof));
  }
}

DirichletMap thermal_dirichlet(const Mesh& mesh, std::span<const BoundaryCondition> bcs) {
  DirichletMap map;
  for (const auto& bc : bcs) {
    if (bc.kind != BoundaryCondition::Kind::dirichlet_temperature) continue;
    for (int id : node_set(mesh, bc.target)) map.set(id, bc.value);
  }
  return map;
}

DirichletMap displacement_dirichlet(const Mesh& mesh, std::span<const BoundaryCondition> bcs) {
  DirichletMap map;
  for (const auto& bc : bcs) {
    if (bc.kind != BoundaryCondition::Kind::dirichlet_displacement) continue;
    for (int id : node_set(mesh, bc.target)) {
      if (bc.ux) map.set(2 * id, *bc.ux);
      if (bc.uy) map.set(2 * id + 1, *bc.uy);
    }
  }
  return map;
}

Eigen::VectorXd ReducedSystem::expand(const Eigen::VectorXd& x_free) const {
  Eigen::VectorXd full = prescribed;
  for (std::size_t i = 0; i < free_dofs.size(); ++i)
    full[free_dofs[i]] = x_free[static_cast<Eigen::Index>(i)];
  return full;
}

Eigen::VectorXd ReducedSystem::reduce_rhs(const Eigen::VectorXd& b_full) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(free_dofs.size()));
  for (std::size_t i = 0; i < free_dofs.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = b_full[free_dofs[i]];
  return out - shift;
}

ReducedSystem apply_dirichlet(const SparseMat& A, const Eigen::VectorXd& b, const DirichletMap& bc) {
  const Eigen::Index n = A.rows();
  ReducedSystem red;
  red.constrained.assign(static_cast<std::size_t>(n), 0);
  red.prescribed = Eigen::VectorXd::Zero(n);
  for (const auto& [dof, value] : bc.values) {
    if (dof < 0 || dof >= n) throw std::runtime_error("Dirichlet dof out of range");
    red.constrained[static_cast<std::size_t>(dof)] = 1;
    red.prescribed[dof] = value;
  }
  std::vector<int> to_reduced(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!red.constrained[static_cast<std::size_t>(i)]) {
      to_reduced[static_cast<std::size_t>(i)] = static_cast<int>(red.free_dofs.size());
      red.free_dofs.push_back(static_cast<int>(i));
    }
  }

  const Eigen::Index nf = static_cast<Eigen::Index>(red.free_dofs.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (Eigen::Index col = 0; col < A.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(A, col); it; ++it) {
      const int ri = to_reduced[static_cast<std::size_t>(it.row())];
      const int rj = to_reduced[static_cast<std::size_t>(it.col())];
      if (ri >= 0 && rj >= 0) trips.emplace_back(ri, rj, it.value());
    }
  }
  red.A.resize(nf, nf);
  red.A.setFromTriplets(trips.begin(), trips.end());

  const Eigen::VectorXd Ax = A * red.prescribed;
  red.shift.resize(nf);
  for (Eigen::Index i = 0; i < nf; ++i) red.shift[i] = Ax[red.free_dofs[static_cast<std::size_t>(i)]];
  red.b = red.reduce_rhs(b);
  return red;
}

namespace {

struct SpdSolver {
  Eigen::SimplicialLLT<SparseMat> llt;

  void factor(const SparseMat& A, const char* what) {
    llt.compute(A);
    if (llt.info() != Eigen::Success) {
      std::ostringstream os;
      os << what << ": sparse Cholesky failed (matrix not SPD)";
      double dmin = std::numeric_limits<double>::max(), dmax = 0.0;
      for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double d = A.coeff(i, i);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
      }
      if (A.rows() > 0) os << "; diagonal range [" << dmin << ", " << dmax << "]";
      throw SolveError(os.str());
    }
  }

  Eigen::VectorXd solve(const SparseMat& A, const Eigen::VectorXd& b, const char* what) const {
    Eigen::VectorXd x = llt.solve(b);
    const double bn = b.norm();
    const double res = (A * x - b).norm();
    if (!(res <= 1e-10 * std::max(bn, 1e-300))) {
      std::ostringstream os;
      os << what << ": residual contract violated, |Ax-b|/|b| = " << res / std::max(bn, 1e-300);
      throw SolveError(os.str());
    }
    return x;
  }
};

// Free thermal nodes with no path to a constrained node make K_th singular;
// name one so the error is actionable.
std::string diagnose_thermal(const SparseMat& K, const ReducedSystem& red) {
  const Eigen::Index n = K.rows();
  std::vector<char> anchored(static_cast<std::size_t>(n), 0);
  std::deque<Eigen::Index> work;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (red.constrained[static_cast<std::size_t>(i)]) {
      anchored[static_cast<std::size_t>(i)] = 1;
      work.push_back(i);
    }
  }
  while (!work.empty()) {
    const Eigen::Index i = work.front();
    work.pop_front();
    for (SparseMat::InnerIterator it(K, i); it; ++it) {
      if (it.value() != 0.0 && !anchored[static_cast<std::size_t>(it.row())]) {
        anchored[static_cast<std::size_t>(it.row())] = 1;
        work.push_back(it.row());
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!anchored[static_cast<std::size_t>(i)])
      return "floating thermal island containing node " + std::to_string(i) +
             " (no Dirichlet temperature or convection reaches it)";
  }
  return "thermal system singular";
}

}  // namespace

Eigen::VectorXd linear_solve(const SparseMat& A, const Eigen::VectorXd& b) {
  if (A.rows() == 0) return Eigen::VectorXd();
  SpdSolver s;
  s.factor(A, "linear_solve");
  return s.solve(A, b, "linear_solve");
}

FieldState solve_steady(const GlobalSystem& sys, const DirichletMap& thermal_bc,
                        const DirichletMap& displacement_bc) {
  FieldState state;
  state.t = 0.0;

  const ReducedSystem th = apply_dirichlet(sys.K_th, sys.f_th, thermal_bc);
  SpdSolver th_solver;
  if (th.A.rows() > 0) {
    try {
      th_solver.factor(th.A, "thermal solve");
    } catch (const SolveError&) {
      throw SolveError("thermal solve: " + diagnose_thermal(sys.K_th, th));
    }
    state.phi = th.expand(th_solver.solve(th.A, th.b, "thermal solve"));
  } else {
    state.phi = th.prescribed;
  }

  if (displacement_bc.values.empty()) {
    // Thermal-only analysis: with no displacement constraints the mechanical
    // problem has free rigid-body modes, so it is skipped.
    state.u = Eigen::VectorXd::Zero(2 * sys.n);
    return state;
  }
  const Eigen::VectorXd f_mech = sys.f_el - sys.C_el * state.phi;
  const ReducedSystem el = apply_dirichlet(sys.K_el, f_mech, displacement_bc);
  SpdSolver el_solver;
  if (el.A.rows() > 0) {
    try {
      el_solver.factor(el.A, "mechanical solve");
    } catch (const SolveError&) {
      throw SolveError(
          "mechanical solve: singular stiffness; displacement constraints leave a free "
          "rigid-body mode");
    }
    state.u = el.expand(el_solver.solve(el.A, el.b, "mechanical solve"));
  } else {
    state.u = el.prescribed;
  }
  return state;
}

std::vector<FieldState> solve_transient(const GlobalSystem& sys, const DirichletMap& thermal_bc,
                                        const DirichletMap& displacement_bc,
                                        const TransientConfig& config) {
  if (!(config.dt > 0.0)) throw std::invalid_argument("transient: dt must be positive");
  if (config.n_steps < 1) throw std::invalid_argument("transient: n_steps must be >= 1");

  Eigen::VectorXd phi = config.phi0.size() == 0 ? Eigen::VectorXd::Zero(sys.n) : config.phi0;
  if (phi.size() != sys.n) throw std::invalid_argument("transient: phi0 size mismatch");

  const SparseMat A = sys.K_th + sys.M_th / config.dt;
  const ReducedSystem th = apply_dirichlet(A, sys.f_th, thermal_bc);
  SpdSolver th_solver;
  if (th.A.rows() > 0) {
    try {
      th_solver.factor(th.A, "transient thermal solve");
    } catch (const SolveError&) {
      throw SolveError("transient thermal solve: " + diagnose_thermal(A, th));
    }
  }

  const bool mech = !displacement_bc.values.empty();
  const ReducedSystem el = apply_dirichlet(sys.K_el, sys.f_el, displacement_bc);
  SpdSolver el_solver;
  if (mech && el.A.rows() > 0) {
    try {
      el_solver.factor(el.A, "mechanical solve");
    } catch (const SolveError&) {
      throw SolveError(
          "mechanical solve: singular stiffness; displacement constraints leave a free "
          "rigid-body mode");
    }
  }

  std::vector<FieldState> states;
  states.reserve(static_cast<std::size_t>(config.n_steps));
  for (int step = 1; step <= config.n_steps; ++step) {
    const Eigen::VectorXd rhs_full = sys.f_th + sys.M_th * phi / config.dt;
    if (th.A.rows() > 0) {
      phi = th.expand(th_solver.solve(th.A, th.reduce_rhs(rhs_full), "transient thermal solve"));
    } else {
      phi = th.prescribed;
    }

    FieldState state;
    state.t = step * config.dt;
    state.phi = phi;
    if (!mech) {
      state.u = Eigen::VectorXd::Zero(2 * sys.n);
    } else if (el.A.rows() > 0) {
      const Eigen::VectorXd f_mech = sys.f_el - sys.C_el * phi;
      state.u = el.expand(el_solver.solve(el.A, el.reduce_rhs(f_mech), "mechanical solve"));
    } else {
      state.u = el.prescribed;
    }
    states.push_back(std::move(state));
  }
  return states;
}

}  // namespace pfem
