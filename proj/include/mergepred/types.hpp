#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mergepred {

// Named error conditions surfaced by the library.
struct SequenceTooShort : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyObservation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingLeadFuture : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AllWeightsZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingTruth : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyEvaluation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Longitudinal state of a single vehicle.
struct VehicleState {
  double x{0.0};  // position [m]
  double v{0.0};  // velocity [m/s]
};

/// Lag and lead vehicle at one timestep.
struct JointState {
  VehicleState lag;
  VehicleState lead;
};

/// Gains and desired gap of the interaction controller. All nonnegative.
struct ControllerParams {
  double k_v{0.0};     // speed-matching gain [1/s]
  double k_g{0.0};     // gap-tracking gain [1/s^2]
  double g_star{0.0};  // desired gap [m]
};

/// Regularization hyperparameters. sigma_a_sq is fixed to 1; the other
/// precisions are tuned relative to it.
struct Hyperparams {
  double alpha{1.0};       // gap-prior precision [1/m^2]
  double g0{0.0};          // prior mean gap [m]
  double beta{1.0};        // gain-shrinkage precision
  double sigma_a_sq{1.0};  // acceleration noise variance, fixed
};

/// One lead/lag pair: an observed window followed by the prediction window.
/// Observed joint states cover t = 1..k, lead_future covers t = k+1..T.
struct Scenario {
  double dt{0.1};           // [s]
  double lead_length{0.0};  // [m]
  std::vector<JointState> observed;
  std::vector<VehicleState> lead_future;
  std::optional<std::vector<VehicleState>> truth_lag_future;

  std::size_t observed_count() const { return observed.size(); }   // k
  std::size_t horizon_steps() const { return lead_future.size(); } // T - k

  /// Throws on a hard invariant violation (k < 2 -> SequenceTooShort,
  /// empty prediction window, nonpositive dt or lead length, non-finite
  /// fields). Overlapping gaps are legal here; ingestion flags them.
  void validate() const;

  /// True when fewer observations than the recommended minimum of four
  /// are available. Callers may warn; estimation still runs at k >= 2.
  bool short_observation() const { return observed.size() < 4; }
};

}  // namespace mergepred
