#include "mergepred/gtrs.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mergepred/likelihood.hpp"
#include "mergepred/model.hpp"
#include "mergepred/rng.hpp"

namespace mergepred {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double quadratic_objective(const MatrixXd& D, const VectorXd& b, const VectorXd& x) {
  return 0.5 * (D * x - b).squaredNorm();
}

double constraint_value(const MatrixXd& E, const VectorXd& c, const VectorXd& x) {
  return x.dot(E * x) + c.dot(x);
}

struct CoreSolution {
  VectorXd x;
  double mu{0.0};
  double primal{0.0};
  double dual{0.0};
  std::vector<std::pair<double, double>> mu_trace;
};

double lagrangian_value(const MatrixXd& K, const VectorXd& rhs, double half_btb,
                        const VectorXd& x) {
  return 0.5 * x.dot(K * x) - rhs.dot(x) + half_btb;
}

/// Moves x along the null direction z of the Hessian so the constraint is
/// met. The objective is constant along z, so any root preserves optimality.
/// Prefers a nonnegative root, then the smaller |t|.
std::optional<VectorXd> restore_along_null(const MatrixXd& E, const VectorXd& c,
                                           const VectorXd& x0, const VectorXd& z,
                                           double scale) {
  const double a = z.dot(E * z);
  const double lin = (2.0 * (E * x0) + c).dot(z);
  const double r0 = constraint_value(E, c, x0);
  const double tiny = 1e-14 * std::max(1.0, scale);

  std::vector<double> roots;
  if (std::fabs(a) <= tiny) {
    if (std::fabs(lin) <= tiny) {
      if (std::fabs(r0) <= SolverTolerances::kConstraintAbs) roots.push_back(0.0);
    } else {
      roots.push_back(-r0 / lin);
    }
  } else {
    const double disc = lin * lin - 4.0 * a * r0;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // Numerically stable pair of quadratic roots.
    const double q = -0.5 * (lin + (lin >= 0.0 ? sq : -sq));
    roots.push_back(q / a);
    if (q != 0.0) roots.push_back(r0 / q);
  }
  if (roots.empty()) return std::nullopt;

  std::optional<VectorXd> best;
  bool best_feasible = false;
  double best_abs_t = std::numeric_limits<double>::infinity();
  for (double t : roots) {
    if (!std::isfinite(t)) continue;
    VectorXd cand = x0 + t * z;
    const bool feasible = cand.minCoeff() >= -1e-10 * std::max(1.0, cand.cwiseAbs().maxCoeff());
    if (!best || (feasible && !best_feasible) ||
        (feasible == best_feasible && std::fabs(t) < best_abs_t)) {
      best = cand;
      best_feasible = feasible;
      best_abs_t = std::fabs(t);
    }
  }
  return best;
}

/// Equality-constrained GTRS core for an arbitrary column subset.
CoreSolution solve_gtrs_core(const MatrixXd& D, const VectorXd& b, const MatrixXd& E,
                             const VectorXd& c) {
  const auto n = D.cols();
  const MatrixXd M = D.transpose() * D;
  const VectorXd flin = D.transpose() * b;
  const double half_btb = 0.5 * b.squaredNorm();

  CoreSolution sol;

  Eigen::SelfAdjointEigenSolver<MatrixXd> m_eig(M);
  const VectorXd m_vals = m_eig.eigenvalues();
  const double m_max = std::max(m_vals.maxCoeff(), 0.0);
  const double rank_cut = std::max(m_max * SolverTolerances::kRankRel,
                                   std::numeric_limits<double>::min());

  int null_dim = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m_vals(i) <= rank_cut) ++null_dim;
  }

  if (null_dim > 0) {
    // D'D is singular. The objective is constant along the null space, so a
    // one-dimensional deficiency can still be resolved exactly when the
    // constraint fixes the free direction (the unregularized g_star case).
    if (null_dim > 1) {
      throw RankDeficient("gtrs: normal matrix has a null space of dimension " +
                          std::to_string(null_dim) + "; supply more observations or priors");
    }
    VectorXd x0 = VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (m_vals(i) > rank_cut) {
        const VectorXd q = m_eig.eigenvectors().col(i);
        x0 += q * (q.dot(flin) / m_vals(i));
      }
    }
    const VectorXd z = m_eig.eigenvectors().col(0);  // eigenvalues ascend
    const double scale = std::max(x0.cwiseAbs().maxCoeff(), 1.0);
    auto restored = restore_along_null(E, c, x0, z, scale * scale);
    if (!restored) {
      throw RankDeficient(
          "gtrs: constraint cannot determine the unobserved direction; supply more "
          "observations or priors");
    }
    sol.x = *restored;
    sol.mu = 0.0;
    sol.primal = quadratic_objective(D, b, sol.x);
    sol.dual = lagrangian_value(M, flin, half_btb, sol.x);
    sol.mu_trace.emplace_back(0.0, constraint_value(E, c, sol.x));
    return sol;
  }

  // Positive definite path: bracket the multiplier interval where
  // M + 2 mu E stays PSD via the eigenvalues of L^{-1} E L^{-T}.
  Eigen::LLT<MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw RankDeficient("gtrs: Cholesky factorization failed");
  }
  MatrixXd half = llt.matrixL().solve(E);
  MatrixXd S = llt.matrixL().solve(half.transpose()).transpose();
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> s_eig(S);
  const double lam_min = s_eig.eigenvalues().minCoeff();
  const double lam_max = s_eig.eigenvalues().maxCoeff();
  if (!(lam_min < 0.0) || !(lam_max > 0.0)) {
    throw NoConvergence("gtrs: constraint curvature is not indefinite in the data metric");
  }
  const double mu_lo = -0.5 / lam_max;
  const double mu_hi = 0.5 / (-lam_min);
  const double margin = SolverTolerances::kEndpointMargin * (mu_hi - mu_lo);

  const auto stationary_point = [&](double mu) -> VectorXd {
    const MatrixXd K = M + 2.0 * mu * E;
    const VectorXd rhs = flin - mu * c;
    return Eigen::LDLT<MatrixXd>(K).solve(rhs);
  };
  const auto residual_at = [&](double mu, VectorXd& x_out) {
    x_out = stationary_point(mu);
    const double r = constraint_value(E, c, x_out);
    sol.mu_trace.emplace_back(mu, r);
    return r;
  };

  const auto finish = [&](double mu, const VectorXd& x) {
    sol.x = x;
    sol.mu = mu;
    sol.primal = quadratic_objective(D, b, x);
    sol.dual = lagrangian_value(M + 2.0 * mu * E, flin - mu * c, half_btb, x);
    return sol;
  };

  VectorXd x0;
  const double r_at_zero = residual_at(0.0, x0);
  const double scale0 = std::max(1.0, x0.cwiseAbs().maxCoeff());
  const double target = 1e-11 * std::max(1.0, scale0 * scale0);
  if (std::fabs(r_at_zero) <= target) {
    return finish(0.0, x0);
  }

  double lo = mu_lo + margin;
  double hi = mu_hi - margin;
  VectorXd x_lo, x_hi;
  double r_lo = residual_at(lo, x_lo);
  double r_hi = residual_at(hi, x_hi);

  // r(x(mu)) is the dual derivative and decreases in mu. If it does not
  // change sign across the interval the dual maximum sits at an endpoint
  // where the Hessian is singular (hard case).
  if (r_lo < 0.0 || r_hi > 0.0) {
    const double mu_end = (r_lo < 0.0) ? mu_lo : mu_hi;
    const MatrixXd K = M + 2.0 * mu_end * E;
    const VectorXd rhs = flin - mu_end * c;
    Eigen::SelfAdjointEigenSolver<MatrixXd> k_eig(0.5 * (K + K.transpose()));
    const double k_max = std::max(k_eig.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
    VectorXd xp = VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (k_eig.eigenvalues()(i) > 1e-10 * k_max) {
        const VectorXd q = k_eig.eigenvectors().col(i);
        xp += q * (q.dot(rhs) / k_eig.eigenvalues()(i));
      }
    }
    const VectorXd z = k_eig.eigenvectors().col(0);
    const double scale = std::max(1.0, xp.cwiseAbs().maxCoeff());
    auto restored = restore_along_null(E, c, xp, z, scale * scale);
    if (!restored) {
      throw NoConvergence("gtrs: hard case at the multiplier boundary has no feasible correction");
    }
    sol.mu_trace.emplace_back(mu_end, constraint_value(E, c, *restored));
    VectorXd x = *restored;
    sol.x = x;
    sol.mu = mu_end;
    sol.primal = quadratic_objective(D, b, x);
    sol.dual = lagrangian_value(K, rhs, half_btb, x);
    return sol;
  }

  // Safeguarded Newton on the residual, falling back to bisection whenever
  // the step leaves the bracket.
  double mu = 0.0;
  double r_mu = r_at_zero;
  VectorXd x_mu = x0;
  if (r_at_zero > 0.0) {
    lo = 0.0;
    r_lo = r_at_zero;
    x_lo = x0;
  } else {
    hi = 0.0;
    r_hi = r_at_zero;
    x_hi = x0;
  }

  const int max_iter = 300;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    const double scale = std::max(1.0, x_mu.cwiseAbs().maxCoeff());
    if (std::fabs(r_mu) <= 1e-11 * std::max(1.0, scale * scale)) {
      converged = true;
      break;
    }
    // Newton step: dr/dmu = -(2Ex + c)' K^{-1} (2Ex + c).
    const MatrixXd K = M + 2.0 * mu * E;
    const VectorXd grad_r = 2.0 * (E * x_mu) + c;
    const double dr = -grad_r.dot(Eigen::LDLT<MatrixXd>(K).solve(grad_r));
    double mu_next = (dr < 0.0) ? mu - r_mu / dr : 0.5 * (lo + hi);
    if (!(mu_next > lo && mu_next < hi)) {
      mu_next = 0.5 * (lo + hi);
    }
    mu = mu_next;
    r_mu = residual_at(mu, x_mu);
    if (r_mu > 0.0) {
      lo = mu;
      r_lo = r_mu;
      x_lo = x_mu;
    } else {
      hi = mu;
      r_hi = r_mu;
      x_hi = x_mu;
    }
    if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(mu))) {
      converged = true;
      break;
    }
  }
  if (!converged && std::fabs(r_mu) > SolverTolerances::kConstraintAbs) {
    throw NoConvergence("gtrs: multiplier search did not reach the constraint tolerance");
  }
  return finish(mu, x_mu);
}

constexpr int kThetaDim = 3;

std::vector<int> free_theta_indices(int fixed_mask) {
  std::vector<int> free;
  for (int j = 0; j < kThetaDim; ++j) {
    if (!(fixed_mask & (1 << j))) free.push_back(j);
  }
  return free;
}

struct PatternCandidate {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  double primal{0.0};
  double dual{0.0};
  double residual{0.0};
  int mask{0};
};

double feasibility_cut(const Eigen::Vector4d& x) {
  return 1e-10 * std::max(1.0, x.cwiseAbs().maxCoeff());
}

/// Exact nonnegative least squares in two columns by enumerating the four
/// active sets. Returns the minimizer of 1/2||a1 y1 + a2 y2 - r||^2, y >= 0.
std::pair<double, double> nnls_two(const VectorXd& a1, const VectorXd& a2,
                                   const VectorXd& r) {
  const double g11 = a1.squaredNorm();
  const double g22 = a2.squaredNorm();
  const double g12 = a1.dot(a2);
  const double r1 = a1.dot(r);
  const double r2 = a2.dot(r);

  double best_y1 = 0.0, best_y2 = 0.0;
  double best = 0.5 * r.squaredNorm();

  const auto consider = [&](double y1, double y2) {
    if (!(y1 >= 0.0) || !(y2 >= 0.0)) return;
    const double value = 0.5 * (y1 * y1 * g11 + 2.0 * y1 * y2 * g12 + y2 * y2 * g22) -
                         y1 * r1 - y2 * r2 + 0.5 * r.squaredNorm();
    if (value < best) {
      best = value;
      best_y1 = y1;
      best_y2 = y2;
    }
  };

  if (g11 > 0.0) consider(r1 / g11, 0.0);
  if (g22 > 0.0) consider(0.0, r2 / g22);
  const double det = g11 * g22 - g12 * g12;
  if (det > 1e-14 * std::max(1.0, g11 * g22)) {
    consider((g22 * r1 - g12 * r2) / det, (g11 * r2 - g12 * r1) / det);
  }
  return {best_y1, best_y2};
}

/// (P1) restricted to a fixed g_star is convex in the gains: the u column
/// folds into the k_g column. Scanning g_star and refining each local
/// minimum of the scan recovers constrained optima that sit inside a face
/// whose unconstrained-sign solution is infeasible, which the active-set
/// patterns alone cannot see.
PatternCandidate scan_gstar_candidate(const MatrixXd& D, const VectorXd& b) {
  const VectorXd a_kv = D.col(0);
  const VectorXd a_gs = D.col(2);
  const VectorXd a_kg0 = D.col(1);
  const VectorXd a_u = D.col(3);

  const auto value_at = [&](double gs, PatternCandidate* out) {
    const VectorXd a_kg = a_kg0 + gs * a_u;
    const VectorXd r = b - gs * a_gs;
    const auto [kv, kg] = nnls_two(a_kv, a_kg, r);
    Eigen::Vector4d x(kv, kg, gs, kg * gs);
    const double value = quadratic_objective(D, b, x);
    if (out) {
      out->x = x;
      out->primal = value;
      out->dual = value;
    }
    return value;
  };

  const double g_cap = std::max(60.0, 4.0 * D.col(1).cwiseAbs().maxCoeff());
  const int n_grid = 2048;
  std::vector<double> values(n_grid + 1);
  for (int i = 0; i <= n_grid; ++i) {
    values[i] = value_at(g_cap * i / n_grid, nullptr);
  }

  PatternCandidate best;
  value_at(0.0, &best);
  for (int i = 0; i <= n_grid; ++i) {
    const bool left_ok = (i == 0) || values[i] <= values[i - 1];
    const bool right_ok = (i == n_grid) || values[i] <= values[i + 1];
    if (!(left_ok && right_ok)) continue;
    // Golden-section refinement on the bracketing cells.
    const double cell = g_cap / n_grid;
    double lo = std::max(0.0, g_cap * i / n_grid - cell);
    double hi = std::min(g_cap, g_cap * i / n_grid + cell);
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double m1 = hi - ratio * (hi - lo);
    double m2 = lo + ratio * (hi - lo);
    double f1 = value_at(m1, nullptr);
    double f2 = value_at(m2, nullptr);
    for (int it = 0; it < 90; ++it) {
      if (f1 <= f2) {
        hi = m2;
        m2 = m1;
        f2 = f1;
        m1 = hi - ratio * (hi - lo);
        f1 = value_at(m1, nullptr);
      } else {
        lo = m1;
        m1 = m2;
        f1 = f2;
        m2 = lo + ratio * (hi - lo);
        f2 = value_at(m2, nullptr);
      }
    }
    PatternCandidate refined;
    value_at(0.5 * (lo + hi), &refined);
    if (refined.primal < best.primal) best = refined;
  }

  best.mask = (best.x(0) == 0.0 ? 1 : 0) | (best.x(1) == 0.0 ? 2 : 0) |
              (best.x(2) == 0.0 ? 4 : 0);
  return best;
}

/// Clamps stray negatives to zero and re-slaves u so the reported solution
/// satisfies both constraints exactly.
void tidy_candidate(const MatrixXd& D, const VectorXd& b, PatternCandidate& cand) {
  bool touched = false;
  for (int i = 0; i < 4; ++i) {
    if (cand.x(i) < 0.0) {
      cand.x(i) = 0.0;
      touched = true;
    }
  }
  if (touched) {
    cand.x(3) = cand.x(1) * cand.x(2);
    cand.primal = quadratic_objective(D, b, cand.x);
  }
  cand.residual = cand.x(1) * cand.x(2) - cand.x(3);
}

}  // namespace

QuadraticSystem assemble_system(const Scenario& scenario, const Hyperparams& gamma) {
  if (scenario.observed.size() < 2) {
    throw SequenceTooShort("assemble_system: need at least two observed states");
  }
  const auto k = scenario.observed.size();
  const std::vector<double> accels =
      finite_diff_accels(observed_lag_velocities(scenario), scenario.dt);

  QuadraticSystem sys;
  sys.D = MatrixXd::Zero(static_cast<Eigen::Index>(k) + 2, 4);
  sys.b = VectorXd::Zero(static_cast<Eigen::Index>(k) + 2);

  for (std::size_t i = 0; i + 1 < k; ++i) {
    const JointState& s = scenario.observed[i];
    sys.D(static_cast<Eigen::Index>(i), 0) = s.lead.v - s.lag.v;
    sys.D(static_cast<Eigen::Index>(i), 1) = gap(s, scenario.lead_length);
    sys.D(static_cast<Eigen::Index>(i), 3) = -1.0;
    sys.b(static_cast<Eigen::Index>(i)) = accels[i];
  }
  const Eigen::Index prior_row = static_cast<Eigen::Index>(k) - 1;
  const double gap_w = std::sqrt(2.0 * gamma.alpha);
  sys.D(prior_row, 2) = gap_w;
  sys.b(prior_row) = gap_w * gamma.g0;
  const double shrink_w = std::sqrt(2.0 * gamma.beta) * gamma.g0;
  sys.D(prior_row + 1, 0) = shrink_w;
  sys.D(prior_row + 2, 1) = shrink_w;

  sys.E = Eigen::Matrix4d::Zero();
  sys.E(1, 2) = 0.5;
  sys.E(2, 1) = 0.5;
  sys.c = Eigen::Vector4d::Zero();
  sys.c(3) = -1.0;
  return sys;
}

RankStatus check_rank(const QuadraticSystem& system) {
  Eigen::JacobiSVD<MatrixXd> svd(system.D);
  const VectorXd sv = svd.singularValues();
  const double cut = sv(0) * SolverTolerances::kRankRel;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++rank;
  }
  return rank == 4 ? RankStatus::FullRank : RankStatus::RankDeficient;
}

GtrsSolution solve_equality_gtrs(const QuadraticSystem& system) {
  CoreSolution core = solve_gtrs_core(system.D, system.b, system.E, system.c);
  GtrsSolution out;
  out.x = core.x;
  out.mu = core.mu;
  out.primal_value = core.primal;
  out.dual_value = core.dual;
  out.mu_trace = std::move(core.mu_trace);
  return out;
}

SolverResult solve_nonnegative(const QuadraticSystem& system) {
  const MatrixXd& D = system.D;
  const VectorXd& b = system.b;

  SolverResult result;

  // Unrestricted equality solve first; a nonnegative solution is the global
  // minimum of the original problem and needs no enumeration.
  GtrsSolution full = solve_equality_gtrs(system);
  if (full.x.minCoeff() >= -feasibility_cut(full.x)) {
    PatternCandidate cand;
    cand.x = full.x;
    cand.primal = full.primal_value;
    cand.dual = full.dual_value;
    cand.mask = 0;
    tidy_candidate(D, b, cand);
    result.x_hat = cand.x;
    result.theta_hat = ControllerParams{cand.x(0), cand.x(1), cand.x(2)};
    result.primal_value = cand.primal;
    result.dual_value = cand.dual;
    result.constraint_residual = cand.residual;
    result.active_set = {false, false, false};
    result.status = SolveStatus::Interior;
    return result;
  }

  // Active-set enumeration over zero patterns of (k_v, k_g, g_star),
  // ordered so earlier entries win ties: fewer fixed variables first,
  // then lexicographic.
  std::vector<int> masks = {1, 2, 4, 3, 5, 6, 7};
  std::optional<PatternCandidate> best;

  for (int mask : masks) {
    const std::vector<int> free = free_theta_indices(mask);
    const bool u_free = !(mask & 0b010) && !(mask & 0b100);

    PatternCandidate cand;
    cand.mask = mask;
    try {
      if (u_free) {
        // The cross term survives: a reduced equality-GTRS.
        const int nf = static_cast<int>(free.size()) + 1;
        MatrixXd Dr(D.rows(), nf);
        MatrixXd Er = MatrixXd::Zero(nf, nf);
        VectorXd cr = VectorXd::Zero(nf);
        int pos_kg = -1, pos_gs = -1;
        for (std::size_t j = 0; j < free.size(); ++j) {
          Dr.col(static_cast<Eigen::Index>(j)) = D.col(free[j]);
          if (free[j] == 1) pos_kg = static_cast<int>(j);
          if (free[j] == 2) pos_gs = static_cast<int>(j);
        }
        Dr.col(nf - 1) = D.col(3);
        Er(pos_kg, pos_gs) = 0.5;
        Er(pos_gs, pos_kg) = 0.5;
        cr(nf - 1) = -1.0;
        CoreSolution red = solve_gtrs_core(Dr, b, Er, cr);
        for (std::size_t j = 0; j < free.size(); ++j) {
          cand.x(free[j]) = red.x(static_cast<Eigen::Index>(j));
        }
        cand.x(3) = red.x(nf - 1);
        cand.primal = red.primal;
        cand.dual = red.dual;
      } else if (!free.empty()) {
        // u is slaved to zero; the reduced fit is plain least squares.
        MatrixXd Df(D.rows(), static_cast<Eigen::Index>(free.size()));
        for (std::size_t j = 0; j < free.size(); ++j) {
          Df.col(static_cast<Eigen::Index>(j)) = D.col(free[j]);
        }
        const VectorXd y = Df.completeOrthogonalDecomposition().solve(b);
        for (std::size_t j = 0; j < free.size(); ++j) {
          cand.x(free[j]) = y(static_cast<Eigen::Index>(j));
        }
        cand.primal = quadratic_objective(D, b, cand.x);
        cand.dual = cand.primal;
      } else {
        cand.primal = quadratic_objective(D, b, cand.x);
        cand.dual = cand.primal;
      }
    } catch (const RankDeficient&) {
      continue;  // pattern unsolvable; others still cover the optimum
    } catch (const NoConvergence&) {
      continue;
    }

    if (cand.x.minCoeff() < -feasibility_cut(cand.x)) {
      continue;
    }
    tidy_candidate(D, b, cand);
    if (!best || cand.primal < best->primal - 1e-12 * std::max(1.0, std::fabs(best->primal))) {
      best = cand;
    }
  }

  // A face whose unconstrained-sign optimum was rejected above may still
  // hold the constrained optimum in its interior; the g_star scan finds it.
  PatternCandidate scanned = scan_gstar_candidate(D, b);
  tidy_candidate(D, b, scanned);
  if (!best || scanned.primal < best->primal - 1e-12 * std::max(1.0, std::fabs(best->primal))) {
    best = scanned;
  }

  // mask 7 (everything fixed at zero) always yields a feasible candidate.
  result.x_hat = best->x;
  result.theta_hat = ControllerParams{best->x(0), best->x(1), best->x(2)};
  result.primal_value = best->primal;
  result.dual_value = best->dual;
  result.constraint_residual = best->residual;
  result.active_set = {(best->mask & 1) != 0, (best->mask & 2) != 0, (best->mask & 4) != 0};
  result.status = SolveStatus::Boundary;
  return result;
}

GlobalCheckReport verify_global(const ControllerParams& theta_hat,
                                const Scenario& scenario, const Hyperparams& gamma,
                                int n_probe, std::uint64_t seed, SolveStatus status) {
  GlobalCheckReport report;
  const bool hat_feasible = future_velocity_feasible(scenario, theta_hat);
  report.certificate_applies = (status == SolveStatus::Interior) && hat_feasible;

  const double f_hat = neg_log_likelihood(scenario, theta_hat, gamma).total;
  Rng rng(seed);
  const double kv_hi = std::max(2.0 * theta_hat.k_v, 1.0);
  const double kg_hi = std::max(2.0 * theta_hat.k_g, 1.0);
  const double gs_hi = std::max({2.0 * theta_hat.g_star, 2.0 * gamma.g0, 10.0});

  for (int i = 0; i < n_probe; ++i) {
    ControllerParams probe;
    if (i % 2 == 0) {
      probe = ControllerParams{rng.uniform(0.0, kv_hi), rng.uniform(0.0, kg_hi),
                               rng.uniform(0.0, gs_hi)};
    } else {
      probe = ControllerParams{std::max(0.0, theta_hat.k_v + 0.5 * rng.normal()),
                               std::max(0.0, theta_hat.k_g + 0.5 * rng.normal()),
                               std::max(0.0, theta_hat.g_star + 0.5 * rng.normal())};
    }
    ++report.probes_tested;
    const LikelihoodBreakdown f = neg_log_likelihood(scenario, probe, gamma);
    if (!f.future_velocity_feasible) continue;
    ++report.probes_feasible;
    const double shortfall = f_hat - f.total;
    report.worst_shortfall = std::max(report.worst_shortfall, shortfall);
    if (f.total < f_hat - 1e-9) {
      ++report.violations;
    }
  }
  return report;
}

}  // namespace mergepred
