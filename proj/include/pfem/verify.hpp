#pragma once

#include "pfem/solver.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pfem {

// Closed-form fields for the ring plate: inner radius 0.25 held at T=3 with
// radial displacement 0.25, outer radius 1.0 at T=1 and fixed.
struct AnalyticRing {
  double a = 0.25;
  double b = 1.0;
  double temperature(double r) const;
  double radial_displacement(double r) const;
  double radial_stress(double r) const;
};

// Relative nodal L2 error ||num - ref|| / ||ref||. Throws on size mismatch or
// zero reference norm.
double l2_error(const Eigen::VectorXd& num, const Eigen::VectorXd& ref);

struct ErrorReport {
  double h = 0.0;
  int elements = 0;
  int nodes = 0;
  double e_T = 0.0;
  double e_U = 0.0;
  double time_s = 0.0;
  bool accel = false;
};

// Point-location + shape-function evaluation over a solved mesh, used to
// transfer reference solutions across meshes and to probe histories.
class FieldInterpolator {
 public:
  explicit FieldInterpolator(const Mesh& mesh);
  int locate(const Vec2& p) const;  // -1 when outside
  double scalar(const Vec2& p, const Eigen::VectorXd& nodal) const;
  Vec2 vector2(const Vec2& p, const Eigen::VectorXd& nodal2n) const;

 private:
  const Mesh& mesh_;
  double cell_ = 0.0;
  Rect bbox_;
  int gx_ = 0, gy_ = 0;
  std::vector<std::vector<int>> buckets_;
};

// --- Benchmarks -------------------------------------------------------------

struct BenchOptions {
  bool accel = true;
  int quad_degree = 4;
  std::string out_dir;  // empty = no files written
  std::uint64_t rng_seed = 20240811;
  bool verbose = false;
};

struct RingResult {
  std::vector<ErrorReport> pfem;
  std::vector<ErrorReport> quad;
  // Element-integrated relative L2 temperature errors, used for the
  // method-vs-method comparison (nodal norms hide interpolation error on
  // structured-topology quad meshes).
  std::vector<double> cont_T_pfem;
  std::vector<double> cont_T_quad;
  double fitted_order_T = 0.0;
  double fitted_order_U = 0.0;
  double max_profile_dev_T = 0.0;  // max nodal |T - T_exact| on finest mesh
  double max_profile_dev_U = 0.0;
  double finest_e_T = 0.0;
};

RingResult bench_ring(std::span<const double> sizes, const BenchOptions& opt = {});

struct PlateVariantResult {
  std::string name;
  int elements = 0;
  int nodes = 0;
  double e_T = 0.0;
  double e_U = 0.0;
  double time_accel_on = 0.0;
  double time_accel_off = 0.0;
  double solution_delta = 0.0;  // accel on vs off, relative
};

struct PlateResult {
  std::vector<PlateVariantResult> variants;  // coarse, refine1, refine2, fine
};

PlateResult bench_plate(const BenchOptions& opt = {});

struct LShapeResult {
  std::vector<double> times;       // t = 0, dt, ..., t_end
  std::vector<double> T_pfem;      // monitoring-point temperature histories
  std::vector<double> T_quad;
  std::vector<double> U_pfem;      // monitoring-point displacement magnitude
  std::vector<double> U_quad;
  double agreement_T = 0.0;        // |pfem-quad|/|quad| at t_end
  double dt_ratio = 0.0;           // Richardson self-convergence ratio
  bool monotone = true;
  Vec2 monitor = Vec2::Zero();
};

LShapeResult bench_lshape(double dt, double t_end, const BenchOptions& opt = {});

// Least-squares slope of log(err) vs log(h).
double fitted_order(std::span<const double> h, std::span<const double> err);

}  // namespace pfem
