#pragma once

#include <cstdint>

#include "mergepred/ngsim.hpp"
#include "mergepred/types.hpp"

namespace mergepred {

/// Ground-truth generator for estimator and calibration tests: a lead with
/// a smooth randomized velocity profile, a lag driven by the interaction
/// controller at theta_star plus optional Gaussian acceleration noise.
struct SynthConfig {
  int n{10};
  ControllerParams theta_star{0.5, 0.2, 12.0};
  Hyperparams gamma{};  // g0 > 0 centers the initial gaps; otherwise g_star does
  double noise_sd{0.0};
  double horizon_seconds{4.8};
  double observe_seconds{3.2};
  double dt{0.1};
  std::uint64_t seed{0};
};

ScenarioManifest synth_scenarios(const SynthConfig& config);

}  // namespace mergepred
