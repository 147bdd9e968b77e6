#pragma once

#include <cstdint>
#include <vector>

#include "mergepred/gtrs.hpp"
#include "mergepred/rng.hpp"
#include "mergepred/types.hpp"

namespace mergepred {

/// Importance-weighted parameter draws with their rollouts. Probabilities
/// are normalized to sum to one; weight-zero draws are retained with p = 0
/// so the sample count stays n. When every draw is infeasible the set
/// collapses onto the estimate's rollout and degenerate_on_estimate is set.
struct WeightedTrajectorySet {
  std::vector<ControllerParams> thetas;
  std::vector<std::vector<VehicleState>> trajectories;  // t = k+1..T each
  std::vector<double> probabilities;
  double effective_sample_size{0.0};
  bool degenerate_on_estimate{false};
};

/// Normal proposal centered on the estimate, isotropic, truncated to the
/// nonnegative octant. Coordinates are independent, so the octant mass is
/// a product of three univariate tail probabilities.
struct TruncatedNormalProposal {
  ControllerParams mean;
  double stddev{1.0};

  ControllerParams sample(Rng& rng) const;
  double density(const ControllerParams& theta) const;
  double log_density(const ControllerParams& theta) const;
};

/// One draw from N(theta_hat, I3) truncated to theta >= 0.
ControllerParams propose(const ControllerParams& theta_hat, Rng& rng);

/// Raw importance weight exp(-f(theta)) / q(theta; theta_hat). Infeasible
/// theta yields 0. Large f underflows here by design; predict() normalizes
/// in log space instead of through this function.
double importance_weight(const ControllerParams& theta, const Scenario& scenario,
                         const Hyperparams& gamma, const ControllerParams& theta_hat);

enum class LeadMode { GroundTruth, ConstantVelocity };

/// Lead states for the prediction window. GroundTruth passes the recorded
/// future through; ConstantVelocity extrapolates from the last observed
/// lead state at its mean observed velocity.
std::vector<VehicleState> lead_future_provider(const Scenario& scenario, LeadMode mode);

struct PredictConfig {
  int n{1000};
  std::uint64_t seed{0};
  double proposal_stddev{1.0};
};

struct Prediction {
  SolverResult solver;
  WeightedTrajectorySet set;
};

/// Full prediction pipeline: estimate theta, draw n proposals, roll each
/// out, weight against exp(-f), normalize. Throws AllWeightsZero when the
/// estimate itself is rollout-infeasible and every draw is too.
Prediction predict(const Scenario& scenario, const Hyperparams& gamma,
                   const PredictConfig& config);

}  // namespace mergepred
