#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "mergepred/types.hpp"

namespace mergepred {

/// Least-squares form of the parameter estimation problem over
/// x = (k_v, k_g, g_star, u):
///
///   minimize  1/2 ||D x - b||^2   s.t.   r(x) = x'Ex + c'x = k_g g_star - u = 0
///
/// with x >= 0. Rows 1..k-1 of D carry the acceleration residuals, one row
/// the gap prior, two rows the gain shrinkage, so D is (k+2) x 4.
struct QuadraticSystem {
  Eigen::MatrixXd D;
  Eigen::VectorXd b;
  Eigen::Matrix4d E;  // symmetric, couples (k_g, g_star) with 1/2 entries
  Eigen::Vector4d c;  // single -1 on the u coordinate
};

enum class RankStatus { FullRank, RankDeficient };

enum class SolveStatus { Interior, Boundary, RankDeficient };

/// Solution of the sign-constrained problem. When status is Interior the
/// equality-constrained minimizer already satisfied x >= 0 and is the global
/// minimum of the original nonconvex fit; Boundary means the active-set
/// enumeration picked a zero pattern.
struct SolverResult {
  Eigen::Vector4d x_hat = Eigen::Vector4d::Zero();
  ControllerParams theta_hat;
  double primal_value{0.0};
  double dual_value{0.0};
  double constraint_residual{0.0};
  std::array<bool, 3> active_set{false, false, false};  // (k_v, k_g, g_star) fixed at 0
  SolveStatus status{SolveStatus::Interior};
};

/// Equality-constrained solve, no sign constraints. mu is the constraint
/// multiplier at the dual optimum; mu_trace records the (mu, r(x(mu)))
/// evaluations of the one-dimensional search for offline inspection.
struct GtrsSolution {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  double mu{0.0};
  double primal_value{0.0};
  double dual_value{0.0};
  std::vector<std::pair<double, double>> mu_trace;
};

/// Tolerances fixed for well-scaled inputs (meters, meters/second).
struct SolverTolerances {
  static constexpr double kConstraintAbs = 1e-8;   // |k_g g_star - u|
  static constexpr double kDualityGapRel = 1e-6;   // |primal - dual| / max(1,|primal|)
  static constexpr double kRankRel = 1e-10;        // singular value cutoff
  static constexpr double kEndpointMargin = 1e-9;  // relative shrink of the mu interval
};

/// Builds (D, b, E, c) from the observed window and hyperparameters.
QuadraticSystem assemble_system(const Scenario& scenario, const Hyperparams& gamma);

/// Numerical column rank of D against a relative singular-value threshold.
RankStatus check_rank(const QuadraticSystem& system);

/// Minimizes 1/2||Dx-b||^2 subject to r(x) = 0 with no sign constraints,
/// by maximizing the one-dimensional dual in mu: for each mu in the interval
/// where D'D + 2 mu E is positive semidefinite, the stationary point solves
/// (D'D + 2 mu E) x = D'b - mu c, and the constraint residual r(x(mu)) is
/// monotone in mu, so a safeguarded root search finds the multiplier. Strong
/// duality holds on this interval; the returned dual_value equals the primal
/// objective up to the root tolerance.
///
/// When D'D is singular only along directions the constraint can restore
/// (the unregularized alpha = 0 fit leaves g_star determined solely through
/// u = k_g g_star), the minimum-norm stationary point is corrected along the
/// null space instead; the objective is constant along that correction, so
/// global optimality is preserved. Any other deficiency throws RankDeficient.
GtrsSolution solve_equality_gtrs(const QuadraticSystem& system);

/// Solves with the additional constraint x >= 0. Returns the equality
/// solution directly when it is already nonnegative (Interior); otherwise
/// enumerates the eight zero patterns over (k_v, k_g, g_star), with u slaved
/// to k_g g_star, solving each reduced problem exactly, and returns the best
/// feasible candidate (Boundary). Ties prefer more free variables, then the
/// lexicographically smaller pattern.
SolverResult solve_nonnegative(const QuadraticSystem& system);

/// Randomized check of the global-optimality certificate: no feasible probe
/// theta may beat f(theta_hat) by more than 1e-9 when theta_hat is interior
/// and rollout-feasible. Violations under Boundary status are informational;
/// the active-set reduction is exact only per pattern.
struct GlobalCheckReport {
  int probes_tested{0};
  int probes_feasible{0};
  int violations{0};
  double worst_shortfall{0.0};  // max over probes of f(theta_hat) - f(probe)
  bool certificate_applies{false};
};

GlobalCheckReport verify_global(const ControllerParams& theta_hat,
                                const Scenario& scenario, const Hyperparams& gamma,
                                int n_probe, std::uint64_t seed,
                                SolveStatus status = SolveStatus::Interior);

}  // namespace mergepred
