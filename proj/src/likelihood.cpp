#include "mergepred/likelihood.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "mergepred/model.hpp"

namespace mergepred {

Hyperparams default_hyperparams(const Scenario& scenario) {
  if (scenario.observed.empty()) {
    throw EmptyObservation("default_hyperparams: scenario has no observed states");
  }
  const std::vector<double> gaps = observed_gaps(scenario);
  const double mean_gap =
      std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
  Hyperparams gamma;
  gamma.alpha = 1.0;
  gamma.beta = 1.0;
  gamma.g0 = mean_gap;
  gamma.sigma_a_sq = 1.0;
  return gamma;
}

double data_fit_term(const Scenario& scenario, const ControllerParams& theta,
                     double sigma_a_sq) {
  if (scenario.observed.size() < 2) {
    throw SequenceTooShort("data_fit_term: need at least two observed states");
  }
  const std::vector<double> accels =
      finite_diff_accels(observed_lag_velocities(scenario), scenario.dt);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < accels.size(); ++i) {
    const double r = accels[i] - controller_accel(scenario.observed[i], theta,
                                                  scenario.lead_length);
    sum_sq += r * r;
  }
  return sum_sq / (2.0 * sigma_a_sq);
}

std::pair<double, double> prior_terms(const ControllerParams& theta,
                                      const Hyperparams& gamma) {
  const double dg = theta.g_star - gamma.g0;
  const double gap_prior = gamma.alpha * dg * dg;
  const double gain_shrinkage =
      gamma.beta * gamma.g0 * gamma.g0 * (theta.k_v * theta.k_v + theta.k_g * theta.k_g);
  return {gap_prior, gain_shrinkage};
}

bool future_velocity_feasible(const Scenario& scenario,
                              const ControllerParams& theta) {
  for (const VehicleState& s : rollout(scenario, theta)) {
    if (!(s.v >= 0.0)) return false;
  }
  return true;
}

LikelihoodBreakdown neg_log_likelihood(const Scenario& scenario,
                                       const ControllerParams& theta,
                                       const Hyperparams& gamma) {
  LikelihoodBreakdown out;
  out.data_fit = data_fit_term(scenario, theta, gamma.sigma_a_sq);
  std::tie(out.gap_prior, out.gain_shrinkage) = prior_terms(theta, gamma);
  out.future_velocity_feasible = future_velocity_feasible(scenario, theta);
  out.total = out.future_velocity_feasible
                  ? out.data_fit + out.gap_prior + out.gain_shrinkage
                  : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace mergepred
