#include "pfem/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace pfem;

TEST_CASE("triangulate_fan conserves area") {
  const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  auto tris = triangulate_fan(square);
  REQUIRE(tris.size() == 4);
  for (const auto& t : tris) {
    CHECK(0.5 * cross2(t[1] - t[0], t[2] - t[0]) == doctest::Approx(0.25).epsilon(1e-12));
  }

  const std::vector<Vec2> tri = {{0, 0}, {2, 0}, {0, 1}};
  tris = triangulate_fan(tri);
  REQUIRE(tris.size() == 3);
  double area = 0.0;
  for (const auto& t : tris) area += 0.5 * cross2(t[1] - t[0], t[2] - t[0]);
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<Vec2> hex;
  for (int k = 0; k < 6; ++k) hex.emplace_back(std::cos(M_PI * k / 3), std::sin(M_PI * k / 3));
  tris = triangulate_fan(hex);
  REQUIRE(tris.size() == 6);
  for (const auto& t : tris) {
    CHECK(0.5 * cross2(t[1] - t[0], t[2] - t[0]) ==
          doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-12));
  }
}

TEST_CASE("polygon_rule integrates monomials exactly") {
  const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  auto integrate = [&](const PolyQuadrature& q, int p, int qq) {
    double s = 0.0;
    for (const auto& pt : q.points) s += pt.w * std::pow(pt.x.x(), p) * std::pow(pt.x.y(), qq);
    return s;
  };

  const auto q1 = polygon_rule(square, 1);
  CHECK(integrate(q1, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  const auto q2 = polygon_rule(square, 2);
  CHECK(integrate(q2, 1, 0) == doctest::Approx(0.5).epsilon(1e-14));
  const auto q4 = polygon_rule(square, 4);
  CHECK(integrate(q4, 2, 2) == doctest::Approx(1.0 / 9).epsilon(1e-13));

  CHECK_THROWS(polygon_rule(square, 3));
}

TEST_CASE("polygon_rule exactness on random polygons vs Green-theorem oracle") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3 + static_cast<int>(rng() % 8);
    const auto poly = testsup::random_convex_polygon(rng, m);
    const auto q = polygon_rule(poly, 4);

    // Area to 1e-12 relative.
    const double exact_area = testsup::exact_monomial_integral(poly, 0, 0);
    CHECK(std::abs(q.area - exact_area) <= 1e-12 * std::abs(exact_area));

    // Every total degree <= 4 monomial.
    for (int p = 0; p <= 4; ++p) {
      for (int qq = 0; p + qq <= 4; ++qq) {
        double s = 0.0;
        for (const auto& pt : q.points) s += pt.w * std::pow(pt.x.x(), p) * std::pow(pt.x.y(), qq);
        const double exact = testsup::exact_monomial_integral(poly, p, qq);
        CHECK(std::abs(s - exact) <= 1e-12 * std::max(std::abs(exact), exact_area));
      }
    }

    // Positivity and strict interiority.
    for (const auto& pt : q.points) {
      CHECK(pt.w > 0.0);
      CHECK(point_in_polygon(poly, pt.x, -1e-12));
    }
  }
}

TEST_CASE("polygon_rule affine invariance") {
  std::mt19937_64 rng(5);
  const auto poly = testsup::random_convex_polygon(rng, 6);
  Eigen::Matrix2d A;
  A << 1.7, 0.4, -0.3, 2.1;
  const Vec2 shift(0.8, -1.2);
  std::vector<Vec2> mapped;
  for (const auto& v : poly) mapped.push_back(A * v + shift);

  const auto q = polygon_rule(poly, 4);
  const auto qm = polygon_rule(mapped, 4);
  REQUIRE(q.points.size() == qm.points.size());
  const double det = A.determinant();
  for (std::size_t i = 0; i < q.points.size(); ++i) {
    const Vec2 expect = A * q.points[i].x + shift;
    CHECK((qm.points[i].x - expect).norm() < 1e-12);
    CHECK(qm.points[i].w == doctest::Approx(det * q.points[i].w).epsilon(1e-12));
  }
}

TEST_CASE("edge_rule") {
  auto integrate = [](const std::vector<QuadPoint>& pts, auto&& f) {
    double s = 0.0;
    for (const auto& p : pts) s += p.w * f(p.x);
    return s;
  };

  const auto r1 = edge_rule({0, 0}, {2, 0}, 1);
  CHECK(integrate(r1, [](const Vec2&) { return 1.0; }) == doctest::Approx(2.0));

  const auto r2 = edge_rule({0, 0}, {1, 0}, 2);
  CHECK(integrate(r2, [](const Vec2& x) { return x.x(); }) == doctest::Approx(0.5));
  for (const auto& p : r2) CHECK(p.w == doctest::Approx(0.5));

  // Degree 2n-1 exactness: cubic with the 2-point rule along a slanted segment.
  const Vec2 a(1, 2), b(4, 6);  // length 5
  const auto r = edge_rule(a, b, 2);
  double s = 0.0;
  for (const auto& p : r) {
    const double t = (p.x - a).norm();
    s += p.w * t * t * t;
  }
  CHECK(s == doctest::Approx(std::pow(5.0, 4) / 4).epsilon(1e-13));

  const auto r3 = edge_rule(a, b, 3);
  s = 0.0;
  for (const auto& p : r3) {
    const double t = (p.x - a).norm();
    s += p.w * std::pow(t, 5);
  }
  CHECK(s == doctest::Approx(std::pow(5.0, 6) / 6).epsilon(1e-13));

  CHECK_THROWS(edge_rule({0, 0}, {0, 0}, 2));
  CHECK_THROWS(edge_rule({0, 0}, {1, 0}, 4));
}
