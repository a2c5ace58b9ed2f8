#include "pfem/element.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace pfem;

namespace {

const std::vector<Vec2> kUnitSquare = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

Material unit_material() {
  Material m;
  m.E = 1.0;
  m.nu = 0.0;
  m.alpha = 1.0;
  return m;
}

}  // namespace

TEST_CASE("material validation and D matrices") {
  Material m = unit_material();
  CHECK_NOTHROW(m.check());
  m.nu = 0.5;
  CHECK_THROWS(m.check());
  m = unit_material();
  m.kx = 0.0;
  CHECK_THROWS(m.check());

  m = unit_material();
  m.E = 2.0;
  m.nu = 0.3;
  const Eigen::Matrix3d Ds = m.elastic_matrix();
  CHECK(Ds(0, 0) == doctest::Approx(2.0 / (1 - 0.09)));
  CHECK(Ds(0, 1) == doctest::Approx(0.3 * 2.0 / (1 - 0.09)));
  CHECK(Ds(2, 2) == doctest::Approx(2.0 / (1 - 0.09) * 0.35));

  m.plane = Plane::strain;
  const Eigen::Matrix3d Dn = m.elastic_matrix();
  const double f = 2.0 / (1.3 * 0.4);
  CHECK(Dn(0, 0) == doctest::Approx(f * 0.7));
  CHECK(Dn(0, 1) == doctest::Approx(f * 0.3));
  CHECK(Dn(2, 2) == doctest::Approx(f * 0.2));

  m.alpha = 0.01;
  CHECK(m.thermal_strain_coeff()[0] == doctest::Approx(0.013));
  m.plane = Plane::stress;
  CHECK(m.thermal_strain_coeff()[0] == doctest::Approx(0.01));
  CHECK(m.thermal_strain_coeff()[2] == 0.0);
}

TEST_CASE("k_thermal matches the bilinear conduction matrix") {
  const auto K = k_thermal(kUnitSquare, unit_material());
  // Closed form: diagonal 2/3, edge-adjacent -1/6, diagonal-adjacent -1/3.
  for (int i = 0; i < 4; ++i) {
    CHECK(K(i, i) == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(K(i, (i + 1) % 4) == doctest::Approx(-1.0 / 6).epsilon(1e-12));
    CHECK(K(i, (i + 2) % 4) == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  }
  // Constant field in the null space.
  CHECK((K * Eigen::Vector4d::Ones()).norm() < 1e-13);

  // Anisotropic split: kx=2, ky=1 equals 2*Kx + 1*Ky from the bilinear oracle.
  Material m = unit_material();
  m.kx = 2.0;
  m.ky = 1.0;
  const auto K21 = k_thermal(kUnitSquare, m);
  const testsup::BilinearRect rect{0, 0, 1, 1};
  const Eigen::Matrix4d oracle =
      rect.conduction(2.0, 0.0) + rect.conduction(0.0, 1.0);
  CHECK((K21 - oracle).norm() < 1e-12);
}

TEST_CASE("m_thermal matches the bilinear mass matrix") {
  const auto M = m_thermal(kUnitSquare, unit_material());
  Eigen::Matrix4d ref;
  ref << 4, 2, 1, 2, 2, 4, 2, 1, 1, 2, 4, 2, 2, 1, 2, 4;
  ref /= 36.0;
  CHECK((M - ref).norm() < 1e-13);
  CHECK(M.sum() == doctest::Approx(1.0).epsilon(1e-12));  // rho c * area

  Material m = unit_material();
  m.rho = 2.0;
  CHECK((m_thermal(kUnitSquare, m) - 2.0 * ref).norm() < 1e-12);
}

TEST_CASE("k_elastic matches the bilinear elasticity matrix") {
  const Material m = unit_material();
  const auto K = k_elastic(kUnitSquare, m);
  const testsup::BilinearRect rect{0, 0, 1, 1};
  const auto oracle = rect.elastic(m.elastic_matrix());
  CHECK((K - oracle).norm() < 1e-12);
  CHECK(K(0, 0) == doctest::Approx(0.5).epsilon(1e-12));  // corner diagonal entry

  // Rigid modes.
  Eigen::VectorXd tx = Eigen::VectorXd::Zero(8), rot = Eigen::VectorXd::Zero(8);
  for (int i = 0; i < 4; ++i) {
    tx[2 * i] = 1.0;
    rot[2 * i] = -kUnitSquare[static_cast<std::size_t>(i)].y();
    rot[2 * i + 1] = kUnitSquare[static_cast<std::size_t>(i)].x();
  }
  CHECK((K * tx).norm() <= 1e-10 * K.norm());
  CHECK((K * rot).norm() <= 1e-10 * K.norm());

  // Doubling E doubles K.
  Material m2 = m;
  m2.E = 2.0;
  CHECK((k_elastic(kUnitSquare, m2) - 2.0 * K).norm() < 1e-12);

  // Plane strain with nu = 0.5 is singular.
  Material bad = m;
  bad.nu = 0.5;
  bad.plane = Plane::strain;
  CHECK_THROWS(k_elastic(kUnitSquare, bad));
}

TEST_CASE("row sums, null spaces and symmetry on random polygons") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3 + static_cast<int>(rng() % 8);
    const auto poly = testsup::random_convex_polygon(rng, m);
    Material mat = unit_material();
    mat.nu = 0.27;
    const auto em = element_matrices(poly, mat);

    CHECK((em.K_th - em.K_th.transpose()).norm() == 0.0);
    CHECK((em.M_th - em.M_th.transpose()).norm() == 0.0);
    CHECK((em.K_el - em.K_el.transpose()).norm() == 0.0);

    CHECK((em.K_th * Eigen::VectorXd::Ones(m)).norm() <= 1e-12 * em.K_th.norm());

    const double area = polygon_geometry(poly).area;
    CHECK(em.M_th.sum() == doctest::Approx(area).epsilon(1e-12));

    Eigen::VectorXd tx = Eigen::VectorXd::Zero(2 * m), ty = Eigen::VectorXd::Zero(2 * m),
                    rot = Eigen::VectorXd::Zero(2 * m);
    for (int i = 0; i < m; ++i) {
      tx[2 * i] = 1.0;
      ty[2 * i + 1] = 1.0;
      rot[2 * i] = -poly[static_cast<std::size_t>(i)].y();
      rot[2 * i + 1] = poly[static_cast<std::size_t>(i)].x();
    }
    CHECK((em.K_el * tx).norm() <= 1e-10 * em.K_el.norm());
    CHECK((em.K_el * ty).norm() <= 1e-10 * em.K_el.norm());
    CHECK((em.K_el * rot).norm() <= 1e-10 * em.K_el.norm());

    // PSD: smallest eigenvalue not meaningfully negative.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_k(em.K_th);
    CHECK(es_k.eigenvalues().minCoeff() >= -1e-12 * em.K_th.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_m(em.M_th);
    CHECK(es_m.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("free thermal expansion is stress free on any element shape") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const int mv = 3 + static_cast<int>(rng() % 8);
    const auto poly = testsup::random_convex_polygon(rng, mv);
    Material mat = unit_material();
    mat.nu = trial % 2 ? 0.3 : 0.0;
    mat.alpha = 0.5;
    const double phi = 2.0;

    const auto em = element_matrices(poly, mat);
    // Pin rigid modes and solve K u = -C phi.
    const int n = 2 * mv;
    Eigen::MatrixXd K = em.K_el;
    Eigen::VectorXd f = -em.C_el * Eigen::VectorXd::Constant(mv, phi);
    // Lagrange-free pinning: fix u at vertex 0 and uy at vertex 1.
    std::vector<int> fixed = {0, 1, 3};
    for (int d : fixed) {
      K.row(d).setZero();
      K.col(d).setZero();
      K(d, d) = 1.0;
      f[d] = 0.0;
    }
    // The system remains consistent because the expansion field can be
    // shifted to satisfy the pins; solve and subtract the linear part.
    Eigen::VectorXd u = K.fullPivLu().solve(f);

    Eigen::VectorXd phi_e = Eigen::VectorXd::Constant(mv, phi);
    const auto rec = stress_recover(poly, mat, phi_e, u);
    const double scale = mat.E * mat.alpha * phi;
    for (const auto& s : rec.samples) {
      CHECK(s.stress.lpNorm<Eigen::Infinity>() <= 1e-10 * scale);
    }
    CHECK(rec.average.lpNorm<Eigen::Infinity>() <= 1e-10 * scale);
  }
}

TEST_CASE("free expansion with zero fields and plane factors") {
  const Material mat = unit_material();
  const auto em = element_matrices(kUnitSquare, mat);
  // phi = 0: no thermal force.
  CHECK((em.C_el * Eigen::Vector4d::Zero()).norm() == 0.0);

  // Plane strain picks up (1+nu) in the coupling: same D at nu=0, so compare
  // at nu = 0.3 against the plane-stress C scaled by D ratio is not direct;
  // instead check the (1+nu) factor with matching D by using nu = 0.
  Material ps = mat, pn = mat;
  pn.plane = Plane::strain;
  const auto Cs = c_coupling(kUnitSquare, ps);
  const auto Cn = c_coupling(kUnitSquare, pn);
  CHECK((Cn - Cs).norm() < 1e-12);  // nu = 0: identical

  ps.nu = 0.25;
  pn.nu = 0.25;
  const auto Cs2 = c_coupling(kUnitSquare, ps);
  const auto Cn2 = c_coupling(kUnitSquare, pn);
  // beta factor (1+nu) plus the D change; verify against explicit formula.
  const Eigen::Vector3d bs = ps.thermal_strain_coeff();
  const Eigen::Vector3d bn = pn.thermal_strain_coeff();
  CHECK(bn[0] == doctest::Approx((1 + 0.25) * bs[0]));
  // Column sums of C equal -integral(B^T D beta), so scaling beta by (1+nu)
  // with the strain D gives Cn2 = (1+nu) * (D_strain/D_stress applied) Cs2;
  // check via the uniform-expansion load of a fully constrained element:
  const Eigen::VectorXd load_s = -Cs2 * Eigen::Vector4d::Ones();
  const Eigen::VectorXd load_n = -Cn2 * Eigen::Vector4d::Ones();
  const double ratio = (pn.elastic_matrix() * bn)[0] / (ps.elastic_matrix() * bs)[0];
  CHECK((load_n - ratio * load_s).norm() <= 1e-12 * load_s.norm());
}

TEST_CASE("stress recovery closed forms") {
  const Material mat = unit_material();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(8);
  auto rec = stress_recover(kUnitSquare, mat, phi, u);
  CHECK(rec.average.norm() == 0.0);

  // Pure uniaxial stretch with nu = 0: sigma = (E e, 0, 0).
  const double e = 0.01;
  for (int i = 0; i < 4; ++i) u[2 * i] = e * kUnitSquare[static_cast<std::size_t>(i)].x();
  rec = stress_recover(kUnitSquare, mat, phi, u);
  CHECK(rec.average[0] == doctest::Approx(mat.E * e).epsilon(1e-12));
  CHECK(std::abs(rec.average[1]) < 1e-14);
  CHECK(std::abs(rec.average[2]) < 1e-14);
}

TEST_CASE("boundary loads") {
  const auto ce = convection_edge({0, 0}, {2, 0}, 3.0, 5.0);
  CHECK(ce.f[0] == doctest::Approx(15.0));
  CHECK(ce.f[1] == doctest::Approx(15.0));
  CHECK(ce.K(0, 0) == doctest::Approx(2.0));
  CHECK(ce.K(0, 1) == doctest::Approx(1.0));
  CHECK(ce.K(1, 0) == doctest::Approx(1.0));
  CHECK(ce.K(1, 1) == doctest::Approx(2.0));

  CHECK(flux_edge({0, 0}, {3, 4}, 0.0).norm() == 0.0);
  const auto f = flux_edge({0, 0}, {3, 4}, 2.0);  // length 5
  CHECK(f[0] == doctest::Approx(-5.0));
  CHECK(f[1] == doctest::Approx(-5.0));

  const auto fs = source_load(kUnitSquare, 3.0);
  CHECK(fs.sum() == doctest::Approx(3.0).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) CHECK(fs[i] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("element matrices on hanging-node squares keep their structure") {
  const std::vector<Vec2> penta = {{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}};
  Material mat = unit_material();
  mat.nu = 0.2;
  const auto em = element_matrices(penta, mat);
  CHECK((em.K_th * Eigen::VectorXd::Ones(5)).norm() <= 1e-12 * em.K_th.norm());
  CHECK(em.M_th.sum() == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd rot = Eigen::VectorXd::Zero(10);
  for (int i = 0; i < 5; ++i) {
    rot[2 * i] = -penta[static_cast<std::size_t>(i)].y();
    rot[2 * i + 1] = penta[static_cast<std::size_t>(i)].x();
  }
  CHECK((em.K_el * rot).norm() <= 1e-10 * em.K_el.norm());
}
