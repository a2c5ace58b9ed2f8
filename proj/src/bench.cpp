#include "pfem/export.hpp"
#include "pfem/verify.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <stdexcept>

namespace pfem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Material ring_material() {
  Material m;  // E = 1, nu = 0, alpha = 1, k = 1, rho c = 1
  m.alpha = 1.0;
  return m;
}

// Quadrilateral comparison mesh on the ring: polar grid with a deterministic
// interior jitter emulating an unstructured paved mesh (a perfectly aligned
// polar grid would be nodally superconvergent for this radially symmetric
// solution and not represent a generic quad mesher). Boundary nodes stay
// exactly on the circles.
Mesh gen_ring_quads(double h, std::uint64_t seed) {
  const double a = 0.25, b = 1.0;
  const int nr = std::max(2, static_cast<int>(std::lround((b - a) / h)));
  const int nt = std::max(8, static_cast<int>(std::lround(2.0 * M_PI * 0.5 * (a + b) / h)));
  Mesh mesh;
  mesh.nodes.reserve(static_cast<std::size_t>((nr + 1) * nt));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i <= nr; ++i) {
    const double r0 = a + (b - a) * i / nr;
    for (int j = 0; j < nt; ++j) {
      const bool interior = i > 0 && i < nr;
      const double dr = interior ? 0.25 * (b - a) / nr * u(rng) : 0.0;
      const double dt = interior ? 0.25 * 2.0 * M_PI / nt * u(rng) : 0.0;
      const double r = r0 + dr;
      const double t = 2.0 * M_PI * j / nt + dt;
      mesh.nodes.push_back({r * std::cos(t), r * std::sin(t)});
    }
  }
  auto id = [nt](int i, int j) { return i * nt + ((j % nt) + nt) % nt; };
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      mesh.elements.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}, 0});
    }
  }
  auto& inner_n = mesh.node_sets["inner"];
  auto& outer_n = mesh.node_sets["outer"];
  auto& inner_e = mesh.edge_sets["inner"];
  auto& outer_e = mesh.edge_sets["outer"];
  for (int j = 0; j < nt; ++j) {
    inner_n.push_back(id(0, j));
    outer_n.push_back(id(nr, j));
    inner_e.emplace_back(id(0, j), id(0, j + 1));
    outer_e.emplace_back(id(nr, j), id(nr, j + 1));
  }
  return mesh;
}

struct RingSolution {
  FieldState state;
  ErrorReport report;
  double cont_e_T = 0.0;
};

// Element-integrated relative L2 error of the temperature field against the
// closed form.
double ring_continuum_error_T(const Mesh& mesh, const Eigen::VectorXd& phi, const AnalyticRing& ring) {
  double num = 0.0, den = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto poly = mesh.element_polygon(e);
    const PolygonBasis basis(poly);
    const auto q = polygon_rule(poly, 4);
    const auto& nd = mesh.elements[static_cast<std::size_t>(e)].nodes;
    for (const auto& qp : q.points) {
      const auto se = basis.eval(qp.x, false);
      double Th = 0.0;
      for (std::size_t i = 0; i < nd.size(); ++i) Th += se.N[static_cast<Eigen::Index>(i)] * phi[nd[i]];
      const double Te = ring.temperature(qp.x.norm());
      num += qp.w * (Th - Te) * (Th - Te);
      den += qp.w * Te * Te;
    }
  }
  return std::sqrt(num / den);
}

RingSolution solve_ring(const Mesh& mesh, double h, const BenchOptions& opt) {
  const AnalyticRing ring;
  const Material mat = ring_material();

  DirichletMap thermal;
  for (int id : mesh.node_sets.at("inner")) thermal.set(id, 3.0);
  for (int id : mesh.node_sets.at("outer")) thermal.set(id, 1.0);
  DirichletMap disp;
  for (int id : mesh.node_sets.at("inner")) {
    const Vec2 rhat = mesh.point(id).normalized();
    disp.set(2 * id, 0.25 * rhat.x());
    disp.set(2 * id + 1, 0.25 * rhat.y());
  }
  for (int id : mesh.node_sets.at("outer")) {
    disp.set(2 * id, 0.0);
    disp.set(2 * id + 1, 0.0);
  }

  AssemblyOptions aopt;
  aopt.quad_degree = opt.quad_degree;
  aopt.accel = opt.accel;

  const auto t0 = Clock::now();
  const auto sys = assemble(mesh, {&mat, 1}, {}, aopt);
  const auto state = solve_steady(sys, thermal, disp);
  const double elapsed = seconds_since(t0);

  const int n = mesh.node_count();
  Eigen::VectorXd T_ref(n), U_ref(2 * n);
  for (int i = 0; i < n; ++i) {
    const Vec2 p = mesh.point(i);
    const double r = p.norm();
    T_ref[i] = ring.temperature(r);
    const Vec2 u = ring.radial_displacement(r) * p / r;
    U_ref[2 * i] = u.x();
    U_ref[2 * i + 1] = u.y();
  }

  RingSolution out;
  out.state = state;
  out.report.h = h;
  out.report.elements = mesh.element_count();
  out.report.nodes = n;
  out.report.e_T = l2_error(state.phi, T_ref);
  out.report.e_U = l2_error(state.u, U_ref);
  out.report.time_s = elapsed;
  out.report.accel = opt.accel;
  out.cont_e_T = ring_continuum_error_T(mesh, state.phi, ring);
  return out;
}

}  // namespace

RingResult bench_ring(std::span<const double> sizes, const BenchOptions& opt) {
  const AnalyticRing ring;
  const double area = M_PI * (ring.b * ring.b - ring.a * ring.a);
  RingResult result;

  Mesh finest_mesh;
  FieldState finest_state;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double h = sizes[i];

    VoronoiOptions vopt;
    vopt.lloyd_iters = 80;
    vopt.rng_seed = opt.rng_seed + i;
    const int n_seeds = std::max(16, static_cast<int>(std::lround(area / (h * h))));
    const Mesh pmesh = gen_voronoi_polygons(Annulus{ring.a, ring.b}, n_seeds, vopt);
    const auto report = validate(pmesh);
    if (!report.ok()) throw std::runtime_error("ring: generated mesh invalid: " + report.summary());
    auto psol = solve_ring(pmesh, h, opt);
    result.pfem.push_back(psol.report);
    result.cont_T_pfem.push_back(psol.cont_e_T);

    const Mesh qmesh = gen_ring_quads(h, opt.rng_seed + 1000 + i);
    const auto qreport = validate(qmesh);
    if (!qreport.ok()) throw std::runtime_error("ring: quad mesh invalid: " + qreport.summary());
    auto qsol = solve_ring(qmesh, h, opt);
    result.quad.push_back(qsol.report);
    result.cont_T_quad.push_back(qsol.cont_e_T);

    if (opt.verbose) {
      std::cout << "ring h=" << h << " pfem e_T=" << psol.report.e_T << " e_U=" << psol.report.e_U
                << " | quad e_T=" << qsol.report.e_T << " e_U=" << qsol.report.e_U << "\n";
    }
    if (i + 1 == sizes.size()) {
      finest_mesh = pmesh;
      finest_state = psol.state;
    }
  }

  std::vector<double> h(sizes.begin(), sizes.end()), eT, eU;
  for (const auto& r : result.pfem) {
    eT.push_back(r.e_T);
    eU.push_back(r.e_U);
  }
  result.fitted_order_T = fitted_order(h, eT);
  result.fitted_order_U = fitted_order(h, eU);
  result.finest_e_T = eT.back();

  // Radial profile deviations on the finest PFEM mesh.
  for (int i = 0; i < finest_mesh.node_count(); ++i) {
    const Vec2 p = finest_mesh.point(i);
    const double r = p.norm();
    result.max_profile_dev_T =
        std::max(result.max_profile_dev_T, std::abs(finest_state.phi[i] - ring.temperature(r)));
    const Vec2 u_exact = ring.radial_displacement(r) * p / r;
    const Vec2 u(finest_state.u[2 * i], finest_state.u[2 * i + 1]);
    result.max_profile_dev_U = std::max(result.max_profile_dev_U, (u - u_exact).norm());
  }

  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    CsvWriter csv(opt.out_dir + "/ring_convergence.csv",
                  {"method", "h", "elements", "nodes", "e_L2_T", "e_L2_U", "e_L2_T_field", "time_s",
                   "accel"});
    auto dump = [&csv](const char* method, const ErrorReport& r, double cont) {
      csv.row_raw(std::string(method) + "," + std::to_string(r.h) + "," + std::to_string(r.elements) +
                  "," + std::to_string(r.nodes) + "," + std::to_string(r.e_T) + "," +
                  std::to_string(r.e_U) + "," + std::to_string(cont) + "," + std::to_string(r.time_s) +
                  "," + (r.accel ? "1" : "0"));
    };
    for (std::size_t i = 0; i < result.pfem.size(); ++i)
      dump("pfem", result.pfem[i], result.cont_T_pfem[i]);
    for (std::size_t i = 0; i < result.quad.size(); ++i)
      dump("quad", result.quad[i], result.cont_T_quad[i]);

    // Radial profiles: nodal temperature/displacement and element-averaged
    // radial stress on the finest mesh.
    CsvWriter prof(opt.out_dir + "/ring_profile.csv",
                   {"r", "T", "T_exact", "u_r", "u_r_exact", "sigma_r", "sigma_r_exact"});
    const Material mat = ring_material();
    for (int e = 0; e < finest_mesh.element_count(); ++e) {
      const auto poly = finest_mesh.element_polygon(e);
      const auto& el = finest_mesh.elements[static_cast<std::size_t>(e)];
      const int m = static_cast<int>(el.nodes.size());
      Eigen::VectorXd phi_e(m), u_e(2 * m);
      for (int k = 0; k < m; ++k) {
        phi_e[k] = finest_state.phi[el.nodes[static_cast<std::size_t>(k)]];
        u_e[2 * k] = finest_state.u[2 * el.nodes[static_cast<std::size_t>(k)]];
        u_e[2 * k + 1] = finest_state.u[2 * el.nodes[static_cast<std::size_t>(k)] + 1];
      }
      const auto rec = stress_recover(poly, mat, phi_e, u_e, 4);
      const Vec2 c = polygon_geometry(poly).centroid;
      const double r = c.norm();
      const Vec2 rhat = c / r;
      const double sr = rec.average[0] * rhat.x() * rhat.x() + rec.average[1] * rhat.y() * rhat.y() +
                        2.0 * rec.average[2] * rhat.x() * rhat.y();
      // Vertex-averaged values stand in for the centroid in the overlay.
      const double T_num = phi_e.mean();
      Eigen::Vector2d u_avg = Eigen::Vector2d::Zero();
      for (int k = 0; k < m; ++k) u_avg += Eigen::Vector2d(u_e[2 * k], u_e[2 * k + 1]) / m;
      prof.row({r, T_num, ring.temperature(r), u_avg.dot(rhat), ring.radial_displacement(r), sr,
                ring.radial_stress(r)});
    }
  }
  return result;
}

// --- Plate ------------------------------------------------------------------

namespace {

struct PlateCase {
  std::string name;
  Mesh mesh;
};

struct PlateSolved {
  FieldState state;
  double time_accel_on = 0.0;
  double time_accel_off = 0.0;
  double solution_delta = 0.0;
};

PlateSolved solve_plate(const Mesh& mesh, const BenchOptions& opt, bool time_both) {
  const Material mat = ring_material();  // same unit properties as the ring
  const std::vector<BoundaryCondition> bcs = {
      BoundaryCondition::dirichlet_temperature("left", 7.0),
      BoundaryCondition::dirichlet_temperature("right", 1.0),
      BoundaryCondition::dirichlet_displacement("left", 0.0, 0.0),
  };
  const auto th = thermal_dirichlet(mesh, bcs);
  const auto dp = displacement_dirichlet(mesh, bcs);

  AssemblyOptions on, off;
  on.quad_degree = off.quad_degree = opt.quad_degree;
  on.accel = true;
  off.accel = false;

  PlateSolved out;
  auto t0 = Clock::now();
  const auto sys_on = assemble(mesh, {&mat, 1}, bcs, on);
  const auto state_on = solve_steady(sys_on, th, dp);
  out.time_accel_on = seconds_since(t0);
  out.state = state_on;

  if (time_both) {
    t0 = Clock::now();
    const auto sys_off = assemble(mesh, {&mat, 1}, bcs, off);
    const auto state_off = solve_steady(sys_off, th, dp);
    out.time_accel_off = seconds_since(t0);
    out.solution_delta = (state_on.u - state_off.u).norm() / state_off.u.norm();
    if (!opt.accel) out.state = state_off;
  }
  return out;
}

}  // namespace

PlateResult bench_plate(const BenchOptions& opt) {
  const Rect domain{0.0, 0.0, 5.0, 1.0};

  std::vector<PlateCase> cases;
  cases.push_back({"coarse", gen_quadtree(domain, 50, 10, {})});
  {
    const std::vector<RefineRegion> mid = {{{2.0, 0.0, 1.0, 1.0}, 1}};
    cases.push_back({"refine1", gen_quadtree(domain, 50, 10, mid)});
  }
  {
    // The displacement error concentrates in the clamped-edge region (the far
    // field is a smooth thermal-expansion profile), so refinement 2 deepens
    // the mesh there.
    const std::vector<RefineRegion> left = {{{0.0, 0.0, 1.5, 1.0}, 2},
                                            {{0.0, 0.0, 0.4, 1.0}, 3}};
    cases.push_back({"refine2", gen_quadtree(domain, 50, 10, left)});
  }
  cases.push_back({"fine", gen_quadtree(domain, 200, 40, {})});

  // Reference: a structured mesh finer than every variant.
  const Mesh ref_mesh = gen_structured_quads(5.0, 1.0, 600, 120);
  const auto ref = solve_plate(ref_mesh, opt, false);
  const FieldInterpolator interp(ref_mesh);

  PlateResult result;
  for (const auto& c : cases) {
    const auto rep = validate(c.mesh);
    if (!rep.ok()) throw std::runtime_error("plate: mesh " + c.name + " invalid: " + rep.summary());
    const auto solved = solve_plate(c.mesh, opt, true);

    const int n = c.mesh.node_count();
    Eigen::VectorXd T_ref(n), U_ref(2 * n);
    for (int i = 0; i < n; ++i) {
      const Vec2 p = c.mesh.point(i);
      T_ref[i] = interp.scalar(p, ref.state.phi);
      const Vec2 u = interp.vector2(p, ref.state.u);
      U_ref[2 * i] = u.x();
      U_ref[2 * i + 1] = u.y();
    }

    PlateVariantResult row;
    row.name = c.name;
    row.elements = c.mesh.element_count();
    row.nodes = n;
    row.e_T = (solved.state.phi - T_ref).norm() / T_ref.norm();
    row.e_U = (solved.state.u - U_ref).norm() / U_ref.norm();
    row.time_accel_on = solved.time_accel_on;
    row.time_accel_off = solved.time_accel_off;
    row.solution_delta = solved.solution_delta;
    result.variants.push_back(row);

    if (opt.verbose) {
      std::cout << "plate " << row.name << ": elements=" << row.elements << " e_U=" << row.e_U
                << " t_on=" << row.time_accel_on << " t_off=" << row.time_accel_off << "\n";
    }
  }

  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    CsvWriter csv(opt.out_dir + "/plate_table.csv",
                  {"mesh", "elements", "nodes", "e_L2_T", "e_L2_U", "time_accel_on_s",
                   "time_accel_off_s", "accel_delta"});
    for (const auto& r : result.variants) {
      csv.row_raw(r.name + "," + std::to_string(r.elements) + "," + std::to_string(r.nodes) + "," +
                  std::to_string(r.e_T) + "," + std::to_string(r.e_U) + "," +
                  std::to_string(r.time_accel_on) + "," + std::to_string(r.time_accel_off) + "," +
                  std::to_string(r.solution_delta));
    }
  }
  return result;
}

// --- L-shape ----------------------------------------------------------------

namespace {

// Unit-arm L: bounding box [0,S]^2 with the upper-right quadrant removed.
// Boundary sets are rebuilt geometrically after carving.
Mesh carve_lshape(const Mesh& box, double S) {
  std::vector<int> keep;
  for (int e = 0; e < box.element_count(); ++e) {
    const Vec2 c = element_geometry(box, e).centroid;
    if (!(c.x() > S / 2 && c.y() > S / 2)) keep.push_back(e);
  }
  Mesh mesh = submesh(box, keep);
  mesh.node_sets.clear();
  mesh.edge_sets.clear();

  const double tol = 1e-9 * S;
  auto& bottom_n = mesh.node_sets["bottom"];
  auto& top_n = mesh.node_sets["top"];
  auto& right_n = mesh.node_sets["right"];
  for (const auto& e : mesh.boundary_edges()) {
    const Vec2 a = mesh.point(e.first), b = mesh.point(e.second);
    const Vec2 mid = 0.5 * (a + b);
    if (std::abs(mid.y()) < tol) {
      mesh.edge_sets["bottom"].push_back(e);
      bottom_n.push_back(e.first);
      bottom_n.push_back(e.second);
    } else if (std::abs(mid.y() - S) < tol) {
      mesh.edge_sets["top"].push_back(e);
      top_n.push_back(e.first);
      top_n.push_back(e.second);
    } else if (std::abs(mid.x() - S) < tol) {
      mesh.edge_sets["right"].push_back(e);
      right_n.push_back(e.first);
      right_n.push_back(e.second);
    }
  }
  for (auto& [name, ids] : mesh.node_sets) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return mesh;
}

Material lshape_material() {
  Material m;
  m.E = 1e4;
  m.nu = 0.3;
  m.alpha = 0.0011;
  m.kx = m.ky = 3.0;
  m.rho = 2000.0;
  m.c = 450.0;  // 0.45 J/(g C) in SI
  m.plane = Plane::stress;
  return m;
}

struct LShapeRun {
  std::vector<double> T;  // monitoring point histories, starting at t=0
  std::vector<double> U;
};

LShapeRun run_lshape(const Mesh& mesh, double dt, int n_steps, const Vec2& monitor,
                     const BenchOptions& opt) {
  const Material mat = lshape_material();
  const std::vector<BoundaryCondition> bcs = {
      BoundaryCondition::dirichlet_temperature("right", 500.0),
      BoundaryCondition::dirichlet_temperature("top", 1000.0),
      BoundaryCondition::dirichlet_displacement("bottom", 0.0, 0.0),
      BoundaryCondition::dirichlet_displacement("top", std::nullopt, 0.1),
  };
  AssemblyOptions aopt;
  aopt.quad_degree = opt.quad_degree;
  aopt.accel = opt.accel;
  const auto sys = assemble(mesh, {&mat, 1}, bcs, aopt);

  TransientConfig cfg;
  cfg.dt = dt;
  cfg.n_steps = n_steps;
  cfg.phi0 = Eigen::VectorXd::Zero(mesh.node_count());
  const auto states =
      solve_transient(sys, thermal_dirichlet(mesh, bcs), displacement_dirichlet(mesh, bcs), cfg);

  const FieldInterpolator interp(mesh);
  LShapeRun run;
  run.T.push_back(0.0);
  run.U.push_back(0.0);
  for (const auto& s : states) {
    run.T.push_back(interp.scalar(monitor, s.phi));
    run.U.push_back(interp.vector2(monitor, s.u).norm());
  }
  return run;
}

}  // namespace

LShapeResult bench_lshape(double dt, double t_end, const BenchOptions& opt) {
  const double S = 0.1;  // overall size; arms S/2 wide
  const int n_steps = static_cast<int>(std::lround(t_end / dt));

  // PFEM mesh: quadtree, refined toward the heated right edge so the hanging
  // nodes sit in the active region; quad mesh: uniform squares at the fine
  // resolution.
  const std::vector<RefineRegion> hot = {{{0.06, 0.0, 0.04, 0.06}, 1}};
  const Mesh pfem_box = gen_quadtree({0, 0, S, S}, 8, 8, hot);
  const Mesh pfem_mesh = carve_lshape(pfem_box, S);
  {
    const auto rep = validate(pfem_mesh);
    if (!rep.ok()) throw std::runtime_error("lshape: pfem mesh invalid: " + rep.summary());
  }
  const Mesh quad_mesh = carve_lshape(gen_structured_quads(S, S, 16, 16), S);

  // Monitoring point: center of the bottom arm, between the re-entrant
  // corner and the heated right edge.
  const Vec2 monitor(0.75 * S, 0.25 * S);

  LShapeResult result;
  result.monitor = monitor;
  const auto pfem = run_lshape(pfem_mesh, dt, n_steps, monitor, opt);
  const auto quad = run_lshape(quad_mesh, dt, n_steps, monitor, opt);
  result.T_pfem = pfem.T;
  result.T_quad = quad.T;
  result.U_pfem = pfem.U;
  result.U_quad = quad.U;
  for (int i = 0; i <= n_steps; ++i) result.times.push_back(i * dt);

  result.agreement_T = std::abs(pfem.T.back() - quad.T.back()) / std::abs(quad.T.back());
  result.monotone = true;
  for (std::size_t i = 1; i < pfem.T.size(); ++i) {
    if (pfem.T[i] < pfem.T[i - 1] - 1e-9 * 1000.0) result.monotone = false;
  }

  // Richardson self-convergence in dt at t_end.
  const auto r1 = run_lshape(pfem_mesh, dt, n_steps, monitor, opt);
  const auto r2 = run_lshape(pfem_mesh, dt / 2, 2 * n_steps, monitor, opt);
  const auto r3 = run_lshape(pfem_mesh, dt / 4, 4 * n_steps, monitor, opt);
  const double d1 = std::abs(r1.T.back() - r2.T.back());
  const double d2 = std::abs(r2.T.back() - r3.T.back());
  result.dt_ratio = d1 / d2;

  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    CsvWriter csv(opt.out_dir + "/lshape_history.csv",
                  {"t", "T_pfem", "T_quad", "U_pfem", "U_quad"});
    for (std::size_t i = 0; i < result.times.size(); ++i) {
      csv.row({result.times[i], result.T_pfem[i], result.T_quad[i], result.U_pfem[i],
               result.U_quad[i]});
    }
    // Final-time contours with element-averaged stresses.
    const Material mat = lshape_material();
    const std::vector<BoundaryCondition> bcs = {
        BoundaryCondition::dirichlet_temperature("right", 500.0),
        BoundaryCondition::dirichlet_temperature("top", 1000.0),
        BoundaryCondition::dirichlet_displacement("bottom", 0.0, 0.0),
        BoundaryCondition::dirichlet_displacement("top", std::nullopt, 0.1),
    };
    AssemblyOptions aopt;
    aopt.quad_degree = opt.quad_degree;
    aopt.accel = opt.accel;
    const auto sys = assemble(pfem_mesh, {&mat, 1}, bcs, aopt);
    TransientConfig cfg;
    cfg.dt = dt;
    cfg.n_steps = n_steps;
    cfg.phi0 = Eigen::VectorXd::Zero(pfem_mesh.node_count());
    const auto states = solve_transient(sys, thermal_dirichlet(pfem_mesh, bcs),
                                        displacement_dirichlet(pfem_mesh, bcs), cfg);
    const auto& last = states.back();
    std::vector<Eigen::Vector3d> stress;
    for (int e = 0; e < pfem_mesh.element_count(); ++e) {
      const auto& el = pfem_mesh.elements[static_cast<std::size_t>(e)];
      const int m = static_cast<int>(el.nodes.size());
      Eigen::VectorXd phi_e(m), u_e(2 * m);
      for (int k = 0; k < m; ++k) {
        phi_e[k] = last.phi[el.nodes[static_cast<std::size_t>(k)]];
        u_e[2 * k] = last.u[2 * el.nodes[static_cast<std::size_t>(k)]];
        u_e[2 * k + 1] = last.u[2 * el.nodes[static_cast<std::size_t>(k)] + 1];
      }
      stress.push_back(stress_recover(pfem_mesh.element_polygon(e), mat, phi_e, u_e).average);
    }
    write_vtk(opt.out_dir + "/lshape_final.vtk", pfem_mesh, last.phi, last.u, &stress);
  }
  return result;
}

}  // namespace pfem
