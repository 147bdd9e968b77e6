#pragma once

#include <vector>

#include "mergepred/types.hpp"

namespace mergepred {

/// Bumper-to-bumper gap: lead position minus lag position minus lead length.
/// May be negative for overlapping data.
double gap(const JointState& s, double lead_length);

/// Interaction controller acceleration
///   a = k_v (v_lead - v_lag) + k_g (gap - g_star).
double controller_accel(const JointState& s, const ControllerParams& theta,
                        double lead_length);

/// One step of the discrete double-integrator:
///   x' = x + v dt + a dt^2/2,  v' = v + a dt.
VehicleState step_lag(const VehicleState& s, double accel, double dt);

/// Rolls the lag vehicle forward through the prediction window under theta.
/// `start` is the lag state at t = k; the lead states are exogenous inputs
/// (observed lead at t = k, then scenario.lead_future). Returns the lag
/// states at t = k+1..T. Velocities are not clamped; the likelihood's
/// feasibility term handles negative ones.
std::vector<VehicleState> rollout(const Scenario& scenario,
                                  const ControllerParams& theta,
                                  const VehicleState& start);

/// Convenience overload starting from the last observed lag state.
std::vector<VehicleState> rollout(const Scenario& scenario,
                                  const ControllerParams& theta);

/// Finite-difference accelerations (v_{t+1} - v_t)/dt, length k-1.
/// Throws SequenceTooShort for fewer than two velocities.
std::vector<double> finite_diff_accels(const std::vector<double>& lag_velocities,
                                       double dt);

/// Observed lag velocities of a scenario, in time order.
std::vector<double> observed_lag_velocities(const Scenario& scenario);

/// Observed gaps of a scenario, in time order.
std::vector<double> observed_gaps(const Scenario& scenario);

}  // namespace mergepred
