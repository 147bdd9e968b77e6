#include "mergepred/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mergepred/likelihood.hpp"
#include "mergepred/model.hpp"

namespace mergepred {

namespace {

constexpr double kRejectionFloor = 0.1;

double octant_mass(const ControllerParams& mean, double sd) {
  return normal_cdf(mean.k_v / sd) * normal_cdf(mean.k_g / sd) *
         normal_cdf(mean.g_star / sd);
}

double truncated_coordinate(double mean, double sd, Rng& rng) {
  const double p_below = normal_cdf(-mean / sd);
  const double u = p_below + rng.uniform() * (1.0 - p_below);
  // u is strictly inside (p_below, 1) so the quantile is finite.
  return mean + sd * normal_quantile(u);
}

}  // namespace

ControllerParams TruncatedNormalProposal::sample(Rng& rng) const {
  if (octant_mass(mean, stddev) >= kRejectionFloor) {
    // Rejection from the untruncated normal is cheap away from the boundary.
    for (;;) {
      const ControllerParams draw{mean.k_v + stddev * rng.normal(),
                                  mean.k_g + stddev * rng.normal(),
                                  mean.g_star + stddev * rng.normal()};
      if (draw.k_v >= 0.0 && draw.k_g >= 0.0 && draw.g_star >= 0.0) return draw;
    }
  }
  // Near the origin fall back to per-coordinate inverse-CDF sampling; the
  // octant is axis-aligned so coordinates stay independent.
  return ControllerParams{truncated_coordinate(mean.k_v, stddev, rng),
                          truncated_coordinate(mean.k_g, stddev, rng),
                          truncated_coordinate(mean.g_star, stddev, rng)};
}

double TruncatedNormalProposal::log_density(const ControllerParams& theta) const {
  if (theta.k_v < 0.0 || theta.k_g < 0.0 || theta.g_star < 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  const double zv = (theta.k_v - mean.k_v) / stddev;
  const double zg = (theta.k_g - mean.k_g) / stddev;
  const double zs = (theta.g_star - mean.g_star) / stddev;
  const double log_norm =
      -3.0 * std::log(stddev * std::sqrt(2.0 * M_PI)) - std::log(octant_mass(mean, stddev));
  return -0.5 * (zv * zv + zg * zg + zs * zs) + log_norm;
}

double TruncatedNormalProposal::density(const ControllerParams& theta) const {
  return std::exp(log_density(theta));
}

ControllerParams propose(const ControllerParams& theta_hat, Rng& rng) {
  return TruncatedNormalProposal{theta_hat, 1.0}.sample(rng);
}

double importance_weight(const ControllerParams& theta, const Scenario& scenario,
                         const Hyperparams& gamma, const ControllerParams& theta_hat) {
  const LikelihoodBreakdown f = neg_log_likelihood(scenario, theta, gamma);
  if (!f.future_velocity_feasible) return 0.0;
  const TruncatedNormalProposal q{theta_hat, 1.0};
  return std::exp(-f.total - q.log_density(theta));
}

std::vector<VehicleState> lead_future_provider(const Scenario& scenario, LeadMode mode) {
  if (mode == LeadMode::GroundTruth) {
    if (scenario.lead_future.empty()) {
      throw MissingLeadFuture("lead_future_provider: scenario has no recorded lead future");
    }
    return scenario.lead_future;
  }
  if (scenario.observed.empty()) {
    throw EmptyObservation("lead_future_provider: no observed lead states to extrapolate");
  }
  double mean_v = 0.0;
  for (const JointState& s : scenario.observed) mean_v += s.lead.v;
  mean_v /= static_cast<double>(scenario.observed.size());

  std::vector<VehicleState> future(scenario.lead_future.size());
  VehicleState lead = scenario.observed.back().lead;
  lead.v = mean_v;
  for (std::size_t j = 0; j < future.size(); ++j) {
    lead.x += mean_v * scenario.dt;
    future[j] = lead;
  }
  return future;
}

Prediction predict(const Scenario& scenario, const Hyperparams& gamma,
                   const PredictConfig& config) {
  scenario.validate();
  const QuadraticSystem system = assemble_system(scenario, gamma);
  Prediction out;
  out.solver = solve_nonnegative(system);
  const ControllerParams theta_hat = out.solver.theta_hat;
  const TruncatedNormalProposal proposal{theta_hat, config.proposal_stddev};

  const int n = config.n;
  WeightedTrajectorySet& set = out.set;
  set.thetas.resize(n);
  set.trajectories.resize(n);
  set.probabilities.assign(n, 0.0);
  std::vector<double> log_weights(n, -std::numeric_limits<double>::infinity());

  for (int i = 0; i < n; ++i) {
    // Independent per-draw streams keep the output identical however the
    // loop is scheduled.
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(i)));
    const ControllerParams theta = proposal.sample(rng);
    set.thetas[i] = theta;
    set.trajectories[i] = rollout(scenario, theta);
    const LikelihoodBreakdown f = neg_log_likelihood(scenario, theta, gamma);
    if (f.future_velocity_feasible) {
      log_weights[i] = -f.total - proposal.log_density(theta);
    }
  }

  const double max_log = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(max_log)) {
    // Every draw landed on an infeasible rollout.
    if (!future_velocity_feasible(scenario, theta_hat)) {
      throw AllWeightsZero(
          "predict: the estimate and all proposal draws produce infeasible rollouts");
    }
    set.thetas = {theta_hat};
    set.trajectories = {rollout(scenario, theta_hat)};
    set.probabilities = {1.0};
    set.effective_sample_size = 1.0;
    set.degenerate_on_estimate = true;
    return out;
  }

  double total = 0.0;
  double total_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = std::exp(log_weights[i] - max_log);
    set.probabilities[i] = w;
    total += w;
    total_sq += w * w;
  }
  for (double& p : set.probabilities) p /= total;
  set.effective_sample_size = total * total / total_sq;
  return out;
}

}  // namespace mergepred
