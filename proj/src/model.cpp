#include "mergepred/model.hpp"

#include <cmath>

namespace mergepred {

namespace {

bool finite(const VehicleState& s) {
  return std::isfinite(s.x) && std::isfinite(s.v);
}

}  // namespace

void Scenario::validate() const {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("scenario: dt must be positive");
  }
  if (!(lead_length > 0.0)) {
    throw std::invalid_argument("scenario: lead_length must be positive");
  }
  if (observed.size() < 2) {
    throw SequenceTooShort("scenario: need at least two observed states, got " +
                           std::to_string(observed.size()));
  }
  if (lead_future.empty()) {
    throw std::invalid_argument("scenario: prediction window is empty (T must exceed k)");
  }
  for (const JointState& s : observed) {
    if (!finite(s.lag) || !finite(s.lead)) {
      throw std::invalid_argument("scenario: non-finite observed state");
    }
  }
  for (const VehicleState& s : lead_future) {
    if (!finite(s)) {
      throw std::invalid_argument("scenario: non-finite lead_future state");
    }
  }
  if (truth_lag_future) {
    if (truth_lag_future->size() != lead_future.size()) {
      throw std::invalid_argument("scenario: truth_lag_future length must match lead_future");
    }
    for (const VehicleState& s : *truth_lag_future) {
      if (!finite(s)) {
        throw std::invalid_argument("scenario: non-finite truth state");
      }
    }
  }
}

double gap(const JointState& s, double lead_length) {
  return s.lead.x - s.lag.x - lead_length;
}

double controller_accel(const JointState& s, const ControllerParams& theta,
                        double lead_length) {
  const double g = gap(s, lead_length);
  return theta.k_v * (s.lead.v - s.lag.v) + theta.k_g * (g - theta.g_star);
}

VehicleState step_lag(const VehicleState& s, double accel, double dt) {
  return VehicleState{s.x + s.v * dt + 0.5 * accel * dt * dt, s.v + accel * dt};
}

std::vector<VehicleState> rollout(const Scenario& scenario,
                                  const ControllerParams& theta,
                                  const VehicleState& start) {
  const std::size_t horizon = scenario.horizon_steps();
  std::vector<VehicleState> out;
  out.reserve(horizon);

  VehicleState lag = start;
  // Lead input at step t=k is the last observed lead; afterwards the
  // provided future states drive the controller.
  VehicleState lead = scenario.observed.back().lead;
  for (std::size_t j = 0; j < horizon; ++j) {
    const double a = controller_accel(JointState{lag, lead}, theta, scenario.lead_length);
    lag = step_lag(lag, a, scenario.dt);
    out.push_back(lag);
    lead = scenario.lead_future[j];
  }
  return out;
}

std::vector<VehicleState> rollout(const Scenario& scenario,
                                  const ControllerParams& theta) {
  return rollout(scenario, theta, scenario.observed.back().lag);
}

std::vector<double> finite_diff_accels(const std::vector<double>& lag_velocities,
                                       double dt) {
  if (lag_velocities.size() < 2) {
    throw SequenceTooShort("finite_diff_accels: need at least two velocities");
  }
  std::vector<double> accels(lag_velocities.size() - 1);
  for (std::size_t i = 0; i + 1 < lag_velocities.size(); ++i) {
    accels[i] = (lag_velocities[i + 1] - lag_velocities[i]) / dt;
  }
  return accels;
}

std::vector<double> observed_lag_velocities(const Scenario& scenario) {
  std::vector<double> v;
  v.reserve(scenario.observed.size());
  for (const JointState& s : scenario.observed) v.push_back(s.lag.v);
  return v;
}

std::vector<double> observed_gaps(const Scenario& scenario) {
  std::vector<double> g;
  g.reserve(scenario.observed.size());
  for (const JointState& s : scenario.observed) g.push_back(gap(s, scenario.lead_length));
  return g;
}

}  // namespace mergepred
