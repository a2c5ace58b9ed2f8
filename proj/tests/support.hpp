#pragma once

// Shared test helpers: polygon generators and independent integration oracles.

#include "pfem/geom.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace testsup {

using pfem::Vec2;

// Random strictly convex CCW m-gon: random edge vectors summing to zero,
// chained in angle order. Rejection keeps consecutive edges clearly
// non-collinear so the polygons stay strictly convex.
inline std::vector<Vec2> random_convex_polygon(std::mt19937_64& rng, int m, double scale = 1.0) {
  std::uniform_real_distribution<double> uang(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> ulen(0.3, 1.0);
  for (;;) {
    std::vector<double> angles(static_cast<std::size_t>(m));
    for (auto& a : angles) a = uang(rng);
    std::sort(angles.begin(), angles.end());
    bool separated = true;
    for (int i = 0; i < m; ++i) {
      double d = angles[static_cast<std::size_t>((i + 1) % m)] - angles[static_cast<std::size_t>(i)];
      if (i + 1 == m) d += 2.0 * M_PI;
      if (d < 1e-2) separated = false;
    }
    if (!separated) continue;

    std::vector<Vec2> edges(static_cast<std::size_t>(m));
    Vec2 sum = Vec2::Zero();
    for (int i = 0; i < m; ++i) {
      const double len = ulen(rng);
      edges[static_cast<std::size_t>(i)] = len * Vec2(std::cos(angles[static_cast<std::size_t>(i)]),
                                                      std::sin(angles[static_cast<std::size_t>(i)]));
      sum += edges[static_cast<std::size_t>(i)];
    }
    // Close the loop by spreading the residual; re-check convexity afterwards.
    for (auto& e : edges) e -= sum / m;

    std::vector<Vec2> poly(static_cast<std::size_t>(m));
    Vec2 p = Vec2::Zero();
    for (int i = 0; i < m; ++i) {
      poly[static_cast<std::size_t>(i)] = p;
      p += edges[static_cast<std::size_t>(i)];
    }
    bool strict = false;
    if (!pfem::polygon_convex_ccw(poly, &strict) || !strict) continue;
    for (auto& v : poly) v *= scale;
    return poly;
  }
}

// Strictly interior point: random positive convex combination of vertices.
inline Vec2 random_interior_point(std::mt19937_64& rng, const std::vector<Vec2>& poly) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  double total = 0.0;
  Vec2 p = Vec2::Zero();
  for (const auto& v : poly) {
    const double w = u(rng);
    p += w * v;
    total += w;
  }
  return p / total;
}

// Exact integral of x^p y^q over a polygon via Green's theorem:
// int x^p y^q dA = 1/(p+1) * closed-integral x^(p+1) y^q dy,
// evaluated edge by edge with a high-order Gauss rule (integrand is a 1D
// polynomial of degree p+q+1 along each edge).
inline double exact_monomial_integral(const std::vector<Vec2>& poly, int p, int q) {
  static const double xs[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double ws[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const std::size_t m = poly.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % m];
    const double dy = b.y() - a.y();
    double edge = 0.0;
    for (int g = 0; g < 8; ++g) {
      const double t = 0.5 * (1.0 + xs[g]);
      const double x = a.x() + t * (b.x() - a.x());
      const double y = a.y() + t * (b.y() - a.y());
      edge += 0.5 * ws[g] * std::pow(x, p + 1) * std::pow(y, q);
    }
    total += edge * dy;
  }
  return total / (p + 1);
}

// Classical bilinear (Q4) element matrices on an axis-aligned rectangle,
// integrated with a 3x3 Gauss-Legendre product rule. Independent of the
// polygon pipeline: shape functions and gradients are written out directly.
struct BilinearRect {
  double x0, y0, w, h;

  void shape(double xi, double eta, double N[4], double dx[4], double dy[4]) const {
    // Node order (x0,y0), (x0+w,y0), (x0+w,y0+h), (x0,y0+h); xi,eta in [0,1].
    N[0] = (1 - xi) * (1 - eta);
    N[1] = xi * (1 - eta);
    N[2] = xi * eta;
    N[3] = (1 - xi) * eta;
    const double gx[4] = {-(1 - eta), (1 - eta), eta, -eta};
    const double gy[4] = {-(1 - xi), -xi, xi, (1 - xi)};
    for (int i = 0; i < 4; ++i) {
      dx[i] = gx[i] / w;
      dy[i] = gy[i] / h;
    }
  }

  template <typename F>
  void integrate(F&& accumulate) const {
    static const double xs[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
    static const double ws[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double N[4], dx[4], dy[4];
        shape(xs[a], xs[b], N, dx, dy);
        accumulate(ws[a] * ws[b] * w * h, N, dx, dy);
      }
    }
  }

  Eigen::Matrix4d conduction(double kx, double ky) const {
    Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
    integrate([&](double wgt, const double*, const double* dx, const double* dy) {
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) K(i, j) += wgt * (kx * dx[i] * dx[j] + ky * dy[i] * dy[j]);
    });
    return K;
  }

  Eigen::Matrix4d mass(double rho_c) const {
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    integrate([&](double wgt, const double* N, const double*, const double*) {
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) M(i, j) += wgt * rho_c * N[i] * N[j];
    });
    return M;
  }

  Eigen::Matrix<double, 8, 8> elastic(const Eigen::Matrix3d& D) const {
    Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
    integrate([&](double wgt, const double*, const double* dx, const double* dy) {
      Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
      for (int i = 0; i < 4; ++i) {
        B(0, 2 * i) = dx[i];
        B(1, 2 * i + 1) = dy[i];
        B(2, 2 * i) = dy[i];
        B(2, 2 * i + 1) = dx[i];
      }
      K += wgt * B.transpose() * D * B;
    });
    return K;
  }
};

}  // namespace testsup
