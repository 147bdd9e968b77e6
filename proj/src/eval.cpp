#include "mergepred/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "mergepred/model.hpp"

namespace mergepred {

namespace {

std::size_t steps_of(const PredictedScenario& s) {
  return s.positions.empty() ? 0 : s.positions.front().size();
}

void require_truth(const PredictedScenario& s, std::size_t step) {
  if (step >= s.truth_positions.size()) {
    throw MissingTruth("metrics: no ground truth at step " + std::to_string(step));
  }
  if (step >= steps_of(s)) {
    throw MissingTruth("metrics: prediction does not reach step " + std::to_string(step));
  }
}

/// Step index (0-based into the prediction window) for a horizon in seconds.
std::size_t horizon_step(double t_seconds, double dt) {
  return static_cast<std::size_t>(std::lround(t_seconds / dt)) - 1;
}

}  // namespace

PredictedScenario to_predicted(const WeightedTrajectorySet& set,
                               const std::vector<VehicleState>& truth, double dt,
                               double predict_time_s) {
  PredictedScenario out;
  out.dt = dt;
  out.predict_time_s = predict_time_s;
  out.probabilities = set.probabilities;
  out.positions.reserve(set.trajectories.size());
  for (const auto& traj : set.trajectories) {
    std::vector<double> xs(traj.size());
    for (std::size_t t = 0; t < traj.size(); ++t) xs[t] = traj[t].x;
    out.positions.push_back(std::move(xs));
  }
  out.truth_positions.reserve(truth.size());
  for (const VehicleState& s : truth) out.truth_positions.push_back(s.x);
  return out;
}

double ade(const PredictedScenario& scenario, std::size_t step) {
  require_truth(scenario, step);
  const double truth = scenario.truth_positions[step];
  double err = 0.0;
  for (std::size_t i = 0; i < scenario.positions.size(); ++i) {
    err += scenario.probabilities[i] * std::fabs(truth - scenario.positions[i][step]);
  }
  return err;
}

namespace {

double expected_sq_error(const PredictedScenario& scenario, std::size_t step) {
  require_truth(scenario, step);
  const double truth = scenario.truth_positions[step];
  double err = 0.0;
  for (std::size_t i = 0; i < scenario.positions.size(); ++i) {
    const double d = truth - scenario.positions[i][step];
    err += scenario.probabilities[i] * d * d;
  }
  return err;
}

}  // namespace

double rmse(const std::vector<PredictedScenario>& scenarios, std::size_t step) {
  double sum = 0.0;
  int count = 0;
  for (const PredictedScenario& s : scenarios) {
    if (step < steps_of(s) && step < s.truth_positions.size()) {
      sum += expected_sq_error(s, step);
      ++count;
    }
  }
  if (count == 0) {
    throw MissingTruth("rmse: no scenario reaches the requested step");
  }
  return std::sqrt(sum / count);
}

double cdf_at_truth(const PredictedScenario& scenario, std::size_t step) {
  require_truth(scenario, step);
  const double truth = scenario.truth_positions[step];
  double mass = 0.0;
  for (std::size_t i = 0; i < scenario.positions.size(); ++i) {
    if (scenario.positions[i][step] <= truth) mass += scenario.probabilities[i];
  }
  return mass;
}

std::vector<double> default_horizon_grid() { return {0.8, 1.6, 2.4, 3.2, 4.0, 4.8}; }

std::vector<double> default_calibration_levels() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

double calibration_score(const std::vector<PredictedScenario>& scenarios,
                         const std::vector<double>& horizons,
                         const std::vector<double>& levels) {
  std::vector<double> cdf_values;
  for (const PredictedScenario& s : scenarios) {
    for (double h : horizons) {
      const std::size_t step = horizon_step(h, s.dt);
      if (step < steps_of(s) && step < s.truth_positions.size()) {
        cdf_values.push_back(cdf_at_truth(s, step));
      }
    }
  }
  if (cdf_values.empty()) {
    throw EmptyEvaluation("calibration_score: no (scenario, horizon) pair has truth");
  }
  double score = 0.0;
  for (double level : levels) {
    std::size_t covered = 0;
    for (double f : cdf_values) {
      if (f <= level) ++covered;
    }
    const double empirical = static_cast<double>(covered) / cdf_values.size();
    score += (level - empirical) * (level - empirical);
  }
  return score;
}

WeightedTrajectorySet cv_baseline(const Scenario& scenario) {
  if (scenario.observed.empty()) {
    throw EmptyObservation("cv_baseline: no observed states");
  }
  double mean_v = 0.0;
  for (const JointState& s : scenario.observed) mean_v += s.lag.v;
  mean_v /= static_cast<double>(scenario.observed.size());

  std::vector<VehicleState> traj(scenario.horizon_steps());
  VehicleState lag = scenario.observed.back().lag;
  lag.v = mean_v;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    lag.x += mean_v * scenario.dt;
    traj[j] = lag;
  }
  WeightedTrajectorySet set;
  set.thetas = {ControllerParams{}};
  set.trajectories = {std::move(traj)};
  set.probabilities = {1.0};
  set.effective_sample_size = 1.0;
  return set;
}

MetricsReport aggregate(const std::vector<PredictedScenario>& scenarios,
                        const std::vector<double>& horizons,
                        const std::vector<double>& levels) {
  MetricsReport report;
  if (scenarios.empty()) return report;

  for (double h : horizons) {
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    int count = 0;
    for (const PredictedScenario& s : scenarios) {
      const std::size_t step = horizon_step(h, s.dt);
      if (step < steps_of(s) && step < s.truth_positions.size()) {
        abs_sum += ade(s, step);
        sq_sum += expected_sq_error(s, step);
        ++count;
      }
    }
    if (count == 0) continue;
    HorizonMetrics m;
    m.t_seconds = h;
    m.scenario_count = count;
    m.ade_m = abs_sum / count;
    m.rmse_m = std::sqrt(sq_sum / count);
    if (m.ade_m > m.rmse_m + 1e-12) {
      throw std::logic_error("aggregate: ADE exceeded RMSE, which violates Jensen");
    }
    report.horizons.push_back(m);
  }

  bool any_truth = !report.horizons.empty();
  if (any_truth) {
    report.calibration = calibration_score(scenarios, horizons, levels);
  }

  double time_sum = 0.0;
  int time_count = 0;
  for (const PredictedScenario& s : scenarios) {
    if (std::isfinite(s.predict_time_s)) {
      time_sum += s.predict_time_s;
      ++time_count;
    }
  }
  report.mean_predict_time_s = time_count > 0 ? time_sum / time_count : 0.0;
  return report;
}

std::string format_table(const MetricsReport& report) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%8s %6s %10s %10s\n", "t (s)", "N", "ADE (m)", "RMSE (m)");
  out += line;
  for (const HorizonMetrics& m : report.horizons) {
    std::snprintf(line, sizeof(line), "%8.1f %6d %10.3f %10.3f\n", m.t_seconds,
                  m.scenario_count, m.ade_m, m.rmse_m);
    out += line;
  }
  std::snprintf(line, sizeof(line), "calibration: %.4f\n", report.calibration);
  out += line;
  std::snprintf(line, sizeof(line), "mean predict time: %.4f s\n", report.mean_predict_time_s);
  out += line;
  return out;
}

}  // namespace mergepred
