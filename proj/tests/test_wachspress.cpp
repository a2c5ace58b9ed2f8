#include "pfem/wachspress.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace pfem;

namespace {

const std::vector<Vec2> kUnitSquare = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

std::vector<Vec2> regular_hexagon() {
  std::vector<Vec2> hex;
  for (int k = 0; k < 6; ++k) hex.emplace_back(std::cos(M_PI * k / 3), std::sin(M_PI * k / 3));
  return hex;
}

}  // namespace

TEST_CASE("shape_values symmetry and boundary cases") {
  auto N = shape_values(kUnitSquare, {0.5, 0.5});
  for (int i = 0; i < 4; ++i) CHECK(N[i] == doctest::Approx(0.25).epsilon(1e-14));

  N = shape_values(kUnitSquare, {0.5, 0.0});
  CHECK(N[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(N[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(N[2]) < 1e-12);
  CHECK(std::abs(N[3]) < 1e-12);

  const auto hex = regular_hexagon();
  N = shape_values(hex, {0, 0});
  for (int i = 0; i < 6; ++i) CHECK(N[i] == doctest::Approx(1.0 / 6).epsilon(1e-13));

  // Kronecker delta at vertices of a random polygon.
  std::mt19937_64 rng(11);
  const auto poly = testsup::random_convex_polygon(rng, 7);
  for (int k = 0; k < 7; ++k) {
    N = shape_values(poly, poly[static_cast<std::size_t>(k)]);
    for (int j = 0; j < 7; ++j) CHECK(N[j] == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-12));
  }

  CHECK_THROWS(shape_values(kUnitSquare, {1.5, 0.5}));
}

TEST_CASE("wachspress equals bilinear on squares and rectangles") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const testsup::BilinearRect rect{0.0, 0.0, 2.5, 0.75};
  const std::vector<Vec2> poly = {{0, 0}, {2.5, 0}, {2.5, 0.75}, {0, 0.75}};
  for (int trial = 0; trial < 50; ++trial) {
    const double xi = u(rng), eta = u(rng);
    const Vec2 p(2.5 * xi, 0.75 * eta);
    double Nb[4], dxb[4], dyb[4];
    rect.shape(xi, eta, Nb, dxb, dyb);
    const auto se = shape_eval(poly, p);
    for (int i = 0; i < 4; ++i) {
      CHECK(se.N[i] == doctest::Approx(Nb[i]).epsilon(1e-12));
      CHECK(se.grad(i, 0) == doctest::Approx(dxb[i]).epsilon(1e-11));
      CHECK(se.grad(i, 1) == doctest::Approx(dyb[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("gradient closed form on the unit square center") {
  const auto g = shape_gradients(kUnitSquare, {0.5, 0.5});
  CHECK(g(0, 0) == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(g(0, 1) == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(g(2, 0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(g(2, 1) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("shape function properties on random polygons (property suite)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3 + static_cast<int>(rng() % 8);
    const auto poly = testsup::random_convex_polygon(rng, m);
    const double diam = polygon_diameter(poly);
    for (int s = 0; s < 10; ++s) {
      const Vec2 p = testsup::random_interior_point(rng, poly);
      const auto se = shape_eval(poly, p);

      CHECK(std::abs(se.N.sum() - 1.0) <= 1e-12);          // partition of unity
      CHECK(se.N.minCoeff() >= -1e-14);                    // non-negativity
      Vec2 lin = Vec2::Zero();
      Vec2 grad_sum = Vec2::Zero();
      Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
      for (int i = 0; i < m; ++i) {
        lin += se.N[i] * poly[static_cast<std::size_t>(i)];
        const Vec2 g(se.grad(i, 0), se.grad(i, 1));
        grad_sum += g;
        jac += g * poly[static_cast<std::size_t>(i)].transpose();
      }
      CHECK((lin - p).norm() <= 1e-12 * diam);             // linear precision
      CHECK(grad_sum.norm() <= 1e-11 / diam * 10);         // gradient partition of unity
      CHECK((jac - Eigen::Matrix2d::Identity()).norm() <= 1e-10);
    }

    // Edge linearity.
    const int edge = static_cast<int>(rng() % m);
    const Vec2 a = poly[static_cast<std::size_t>(edge)];
    const Vec2 b = poly[static_cast<std::size_t>((edge + 1) % m)];
    const double t = u01(rng);
    const auto N = shape_values(poly, a + t * (b - a));
    CHECK(std::abs(N[edge] - (1.0 - t)) <= 1e-10);
    CHECK(std::abs(N[(edge + 1) % m] - t) <= 1e-10);
    for (int j = 0; j < m; ++j) {
      if (j != edge && j != (edge + 1) % m) CHECK(std::abs(N[j]) <= 1e-10);
    }
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 3 + static_cast<int>(rng() % 8);
    const auto poly = testsup::random_convex_polygon(rng, m);
    const double diam = polygon_diameter(poly);
    const double step = 1e-6 * diam;
    for (int s = 0; s < 5; ++s) {
      // Keep the stencil strictly interior.
      Vec2 p = testsup::random_interior_point(rng, poly);
      const auto g = shape_gradients(poly, p);
      const auto nxp = shape_values(poly, p + Vec2(step, 0));
      const auto nxm = shape_values(poly, p - Vec2(step, 0));
      const auto nyp = shape_values(poly, p + Vec2(0, step));
      const auto nym = shape_values(poly, p - Vec2(0, step));
      const double scale = std::max(g.lpNorm<Eigen::Infinity>(), 1.0 / diam);
      for (int i = 0; i < m; ++i) {
        const double fdx = (nxp[i] - nxm[i]) / (2 * step);
        const double fdy = (nyp[i] - nym[i]) / (2 * step);
        worst = std::max(worst, std::abs(g(i, 0) - fdx) / scale);
        worst = std::max(worst, std::abs(g(i, 1) - fdy) / scale);
      }
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("mapped basis on hanging-node squares") {
  // Unit square with a mid node on the bottom edge: weakly convex pentagon.
  const std::vector<Vec2> penta = {{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}};
  PolygonBasis basis(penta);
  CHECK(basis.mapped());

  std::mt19937_64 rng(17);
  for (int s = 0; s < 25; ++s) {
    const Vec2 p = testsup::random_interior_point(rng, penta);
    const auto se = basis.eval(p);
    CHECK(std::abs(se.N.sum() - 1.0) <= 1e-12);
    Vec2 lin = Vec2::Zero();
    Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
    Vec2 gsum = Vec2::Zero();
    for (int i = 0; i < 5; ++i) {
      lin += se.N[i] * penta[static_cast<std::size_t>(i)];
      const Vec2 g(se.grad(i, 0), se.grad(i, 1));
      gsum += g;
      jac += g * penta[static_cast<std::size_t>(i)].transpose();
    }
    CHECK((lin - p).norm() <= 1e-12);
    CHECK(gsum.norm() <= 1e-11);
    CHECK((jac - Eigen::Matrix2d::Identity()).norm() <= 1e-10);
  }

  // Kronecker delta at all five nodes, including the hanging one.
  for (int k = 0; k < 5; ++k) {
    const auto se = basis.eval(penta[static_cast<std::size_t>(k)], false);
    for (int j = 0; j < 5; ++j) CHECK(se.N[j] == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-11));
  }

  // Linear trace on the split bottom edge: conforming with the fine side.
  const auto se = basis.eval({0.25, 0.0}, false);
  CHECK(se.N[0] == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(se.N[1] == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(std::abs(se.N[2]) < 1e-11);
  CHECK(std::abs(se.N[3]) < 1e-11);
  CHECK(std::abs(se.N[4]) < 1e-11);

  // A strictly convex polygon takes the direct path.
  CHECK_FALSE(PolygonBasis(kUnitSquare).mapped());
}
