#pragma once

#include <utility>

#include "mergepred/types.hpp"

namespace mergepred {

/// The four summands of the regularized negative log-likelihood f(theta).
/// total is +infinity exactly when the predicted future velocities are
/// infeasible; otherwise it is the sum of the three finite terms.
struct LikelihoodBreakdown {
  double data_fit{0.0};
  double gap_prior{0.0};
  double gain_shrinkage{0.0};
  bool future_velocity_feasible{true};
  double total{0.0};
};

/// Default hyperparameters: g0 = mean observed gap, alpha = beta = 1,
/// sigma_a_sq = 1. Throws EmptyObservation when no states were observed.
/// A zero mean gap makes the shrinkage term vanish; callers may warn.
Hyperparams default_hyperparams(const Scenario& scenario);

/// (1/(2 sigma_a_sq)) * sum of squared acceleration residuals over the
/// observed window, with accelerations finite-differenced from velocity.
double data_fit_term(const Scenario& scenario, const ControllerParams& theta,
                     double sigma_a_sq = 1.0);

/// Returns (gap_prior, gain_shrinkage):
///   alpha (g_star - g0)^2  and  beta g0^2 (k_v^2 + k_g^2).
std::pair<double, double> prior_terms(const ControllerParams& theta,
                                      const Hyperparams& gamma);

/// True iff every rollout velocity over the prediction window is >= 0.
/// The boundary v = 0 counts as feasible (a standing vehicle is valid).
bool future_velocity_feasible(const Scenario& scenario,
                              const ControllerParams& theta);

/// Assembles f(theta) from its terms.
LikelihoodBreakdown neg_log_likelihood(const Scenario& scenario,
                                       const ControllerParams& theta,
                                       const Hyperparams& gamma);

}  // namespace mergepred
