#pragma once

#include <Eigen/Core>

#include <array>
#include <limits>

namespace mergepred::testutil {

/// Quadratic objective on the constraint manifold: u is slaved to k_g g_star.
inline double manifold_objective(const Eigen::MatrixXd& D, const Eigen::VectorXd& b,
                                 double kv, double kg, double gs) {
  Eigen::Vector4d x(kv, kg, gs, kg * gs);
  return 0.5 * (D * x - b).squaredNorm();
}

struct GridMinimum {
  double value{std::numeric_limits<double>::infinity()};
  std::array<double, 3> argmin{0.0, 0.0, 0.0};
  bool on_outer_edge{false};
};

/// Coarse-to-fine grid minimizer over (k_v, k_g, g_star); each pass shrinks
/// the box around the incumbent. Independent of the solver: nothing but the
/// manifold objective is evaluated.
inline GridMinimum brute_force_min(const Eigen::MatrixXd& D, const Eigen::VectorXd& b,
                                   std::array<double, 3> lo, std::array<double, 3> hi,
                                   int points = 33, int passes = 6) {
  const std::array<double, 3> outer_lo = lo;
  const std::array<double, 3> outer_hi = hi;
  GridMinimum best;
  for (int pass = 0; pass < passes; ++pass) {
    GridMinimum pass_best;
    for (int i = 0; i < points; ++i) {
      const double kv = lo[0] + (hi[0] - lo[0]) * i / (points - 1);
      for (int j = 0; j < points; ++j) {
        const double kg = lo[1] + (hi[1] - lo[1]) * j / (points - 1);
        for (int m = 0; m < points; ++m) {
          const double gs = lo[2] + (hi[2] - lo[2]) * m / (points - 1);
          const double value = manifold_objective(D, b, kv, kg, gs);
          if (value < pass_best.value) {
            pass_best.value = value;
            pass_best.argmin = {kv, kg, gs};
          }
        }
      }
    }
    if (pass_best.value < best.value) best = pass_best;
    for (int d = 0; d < 3; ++d) {
      const double span = (hi[d] - lo[d]) * 0.2;
      lo[d] = std::max(outer_lo[d], pass_best.argmin[d] - 0.5 * span);
      hi[d] = std::min(outer_hi[d], pass_best.argmin[d] + 0.5 * span);
    }
  }
  for (int d = 0; d < 3; ++d) {
    const double span = outer_hi[d] - outer_lo[d];
    if (best.argmin[d] <= outer_lo[d] + 1e-9 * span && outer_lo[d] != 0.0) {
      best.on_outer_edge = true;
    }
    if (best.argmin[d] >= outer_hi[d] - 1e-9 * span) best.on_outer_edge = true;
  }
  return best;
}

}  // namespace mergepred::testutil
