#include "pfem/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace pfem;

TEST_CASE("l2_error") {
  Eigen::VectorXd ref(2), num(2);
  ref << 3, 4;
  num = ref;
  CHECK(l2_error(num, ref) == 0.0);
  CHECK(l2_error(1.1 * ref, ref) == doctest::Approx(0.1).epsilon(1e-12));
  num << 3, 5;
  CHECK(l2_error(num, ref) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS(l2_error(num, Eigen::VectorXd::Zero(2)));
  CHECK_THROWS(l2_error(Eigen::VectorXd::Zero(3), ref));
}

TEST_CASE("analytic ring closed forms") {
  const AnalyticRing ring;
  CHECK(ring.temperature(0.25) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ring.temperature(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ring.temperature(0.5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ring.radial_displacement(0.25) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ring.radial_displacement(1.0) == doctest::Approx(0.0));
  CHECK(ring.radial_displacement(0.5) == doctest::Approx(0.25).epsilon(1e-14));
  // Radial stress consistent with the displacement/temperature fields at the
  // midpoint: sigma_r = u' - T with E = 1, nu = 0 (plane stress).
  const double r = 0.5, dr = 1e-6;
  const double du = (ring.radial_displacement(r + dr) - ring.radial_displacement(r - dr)) / (2 * dr);
  CHECK(ring.radial_stress(r) == doctest::Approx(du - ring.temperature(r)).epsilon(1e-8));
}

TEST_CASE("fitted_order recovers a known slope") {
  const std::vector<double> h = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> err;
  for (double hi : h) err.push_back(3.0 * hi * hi);
  CHECK(fitted_order(h, err) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("field interpolation across a mesh") {
  const Mesh mesh = gen_structured_quads(2.0, 1.0, 8, 4);
  Eigen::VectorXd nodal(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Vec2 p = mesh.point(i);
    nodal[i] = 2.0 * p.x() - 3.0 * p.y() + 0.5;
  }
  const FieldInterpolator interp(mesh);
  CHECK(interp.scalar({0.3, 0.7}, nodal) == doctest::Approx(2.0 * 0.3 - 3.0 * 0.7 + 0.5).epsilon(1e-12));
  CHECK(interp.scalar({0.0, 0.0}, nodal) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(interp.scalar({2.0, 1.0}, nodal) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(interp.locate({3.0, 0.5}) == -1);

  Eigen::VectorXd disp(2 * mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Vec2 p = mesh.point(i);
    disp[2 * i] = p.y();
    disp[2 * i + 1] = -p.x();
  }
  const Vec2 v = interp.vector2({1.25, 0.5}, disp);
  CHECK(v.x() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(v.y() == doctest::Approx(-1.25).epsilon(1e-12));
}
