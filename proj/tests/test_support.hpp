#pragma once

#include <cmath>
#include <vector>

#include "mergepred/types.hpp"

namespace mergepred::testutil {

/// Lag and lead cruising at the same speed with the gap at g_star: the
/// controller error is zero everywhere, so any theta with that g_star keeps
/// the motion unchanged.
inline Scenario equilibrium_scenario(int k, int horizon, double speed = 15.0,
                                     double g_star = 12.0, double lead_length = 4.5,
                                     double dt = 0.1) {
  Scenario s;
  s.dt = dt;
  s.lead_length = lead_length;
  double lag_x = 0.0;
  double lead_x = g_star + lead_length;
  for (int t = 0; t < k; ++t) {
    s.observed.push_back(JointState{VehicleState{lag_x, speed}, VehicleState{lead_x, speed}});
    lag_x += speed * dt;
    lead_x += speed * dt;
  }
  std::vector<VehicleState> truth;
  for (int t = 0; t < horizon; ++t) {
    s.lead_future.push_back(VehicleState{lead_x, speed});
    truth.push_back(VehicleState{lag_x, speed});
    lag_x += speed * dt;
    lead_x += speed * dt;
  }
  s.truth_lag_future = truth;
  return s;
}

}  // namespace mergepred::testutil
