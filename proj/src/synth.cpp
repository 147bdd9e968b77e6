#include "mergepred/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "mergepred/model.hpp"
#include "mergepred/rng.hpp"

namespace mergepred {

namespace {

Scenario generate_one(const SynthConfig& config, Rng& rng) {
  const int k = static_cast<int>(std::lround(config.observe_seconds / config.dt));
  const int horizon = static_cast<int>(std::lround(config.horizon_seconds / config.dt));
  if (k < 2 || horizon < 1) {
    throw std::invalid_argument("synth_scenarios: windows too short for dt");
  }

  const double v0 = rng.uniform(8.0, 14.0);
  const double amplitude = rng.uniform(0.0, 1.5);
  const double omega = rng.uniform(0.2, 0.8);
  const double phase = rng.uniform(0.0, 2.0 * M_PI);
  const double lead_length = rng.uniform(4.0, 5.5);
  const double gap_center =
      config.gamma.g0 > 0.0 ? config.gamma.g0 : config.theta_star.g_star;
  const double gap0 = std::max(2.0, gap_center + rng.uniform(-2.0, 2.0));

  VehicleState lag{0.0, v0 + rng.uniform(-1.0, 1.0)};
  VehicleState lead{gap0 + lead_length, v0 + amplitude * std::sin(phase)};

  Scenario scenario;
  scenario.dt = config.dt;
  scenario.lead_length = lead_length;
  std::vector<VehicleState> lag_states, lead_states;
  lag_states.push_back(lag);
  lead_states.push_back(lead);

  for (int t = 0; t + 1 < k + horizon; ++t) {
    const double time = (t + 1) * config.dt;
    const double lead_accel = amplitude * omega * std::cos(omega * time + phase);
    double accel = controller_accel(JointState{lag, lead}, config.theta_star,
                                    lead_length);
    if (config.noise_sd > 0.0) accel += config.noise_sd * rng.normal();
    lag = step_lag(lag, accel, config.dt);
    lead = step_lag(lead, lead_accel, config.dt);
    lag_states.push_back(lag);
    lead_states.push_back(lead);
  }

  for (int t = 0; t < k; ++t) {
    scenario.observed.push_back(JointState{lag_states[t], lead_states[t]});
  }
  std::vector<VehicleState> truth;
  for (int t = k; t < k + horizon; ++t) {
    scenario.lead_future.push_back(lead_states[t]);
    truth.push_back(lag_states[t]);
  }
  scenario.truth_lag_future = std::move(truth);
  return scenario;
}

bool physical(const Scenario& scenario) {
  for (const JointState& s : scenario.observed) {
    if (s.lag.v < 0.25 || s.lead.v < 0.25) return false;
  }
  for (const VehicleState& s : *scenario.truth_lag_future) {
    if (s.v < 0.25) return false;
  }
  return true;
}

}  // namespace

ScenarioManifest synth_scenarios(const SynthConfig& config) {
  if (config.theta_star.k_v < 0.0 || config.theta_star.k_g < 0.0 ||
      config.theta_star.g_star < 0.0) {
    throw std::invalid_argument("synth_scenarios: theta_star must be nonnegative");
  }
  ScenarioManifest manifest;
  Rng rng(config.seed);
  for (int i = 0; i < config.n; ++i) {
    Scenario scenario = generate_one(config, rng);
    // Redraw profiles that brake to a near stop; the retry path is part of
    // the deterministic stream, so a fixed seed reproduces the manifest.
    int attempts = 0;
    while (!physical(scenario) && ++attempts < 64) {
      scenario = generate_one(config, rng);
    }
    ManifestEntry entry;
    entry.id = "synth-" + std::to_string(i);
    entry.scenario = std::move(scenario);
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace mergepred
