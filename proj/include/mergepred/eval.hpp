#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mergepred/sampler.hpp"
#include "mergepred/types.hpp"

namespace mergepred {

/// Per-horizon aggregate over the scenarios whose prediction window reaches
/// that horizon.
struct HorizonMetrics {
  double t_seconds{0.0};
  int scenario_count{0};
  double ade_m{0.0};
  double rmse_m{0.0};
};

struct MetricsReport {
  std::vector<HorizonMetrics> horizons;
  double calibration{0.0};
  double mean_predict_time_s{0.0};
};

/// Wire-level view of one scenario's prediction: sampled positions per step
/// with their probabilities, plus the true lag positions when known.
struct PredictedScenario {
  std::vector<std::vector<double>> positions;  // sample-major: [sample][step]
  std::vector<double> probabilities;
  std::vector<double> truth_positions;  // per step; empty when unknown
  double predict_time_s{std::numeric_limits<double>::quiet_NaN()};
  double dt{0.1};
};

PredictedScenario to_predicted(const WeightedTrajectorySet& set,
                               const std::vector<VehicleState>& truth, double dt,
                               double predict_time_s = std::numeric_limits<double>::quiet_NaN());

/// Expected absolute position error of one scenario at a predicted step.
double ade(const PredictedScenario& scenario, std::size_t step);

/// Root of the mean (over scenarios) expected squared error at a step index,
/// counting only scenarios that reach it.
double rmse(const std::vector<PredictedScenario>& scenarios, std::size_t step);

/// Weighted predictive CDF evaluated at the true position: total probability
/// of sampled positions <= truth. Ties accumulate.
double cdf_at_truth(const PredictedScenario& scenario, std::size_t step);

std::vector<double> default_horizon_grid();        // {0.8, 1.6, ..., 4.8} s
std::vector<double> default_calibration_levels();  // {0.1, ..., 0.9}

/// Sum over levels of (level - empirical coverage)^2, pooling every
/// (scenario, horizon) pair with truth available.
double calibration_score(const std::vector<PredictedScenario>& scenarios,
                         const std::vector<double>& horizons = default_horizon_grid(),
                         const std::vector<double>& levels = default_calibration_levels());

/// Constant-velocity baseline: a single trajectory at probability one,
/// extrapolated at the mean observed lag velocity.
WeightedTrajectorySet cv_baseline(const Scenario& scenario);

/// ADE/RMSE per horizon plus the pooled calibration score. Horizons with no
/// qualifying scenario are dropped. Throws if ADE exceeds RMSE anywhere.
MetricsReport aggregate(const std::vector<PredictedScenario>& scenarios,
                        const std::vector<double>& horizons = default_horizon_grid(),
                        const std::vector<double>& levels = default_calibration_levels());

/// Fixed-width text table of a report, one row per horizon.
std::string format_table(const MetricsReport& report);

}  // namespace mergepred
