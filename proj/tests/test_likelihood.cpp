#include "mergepred/likelihood.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mergepred/model.hpp"
#include "mergepred/rng.hpp"
#include "mergepred/synth.hpp"
#include "test_support.hpp"

using namespace mergepred;

namespace {

/// Independent restatement of f(theta): straight summation over the window,
/// kept free of the library's term functions.
double recompute_total(const Scenario& s, const ControllerParams& theta,
                       const Hyperparams& gamma) {
  double fit = 0.0;
  for (std::size_t i = 0; i + 1 < s.observed.size(); ++i) {
    const double a_hat =
        (s.observed[i + 1].lag.v - s.observed[i].lag.v) / s.dt;
    const double g = s.observed[i].lead.x - s.observed[i].lag.x - s.lead_length;
    const double h = theta.k_v * (s.observed[i].lead.v - s.observed[i].lag.v) +
                     theta.k_g * (g - theta.g_star);
    fit += (a_hat - h) * (a_hat - h);
  }
  fit /= 2.0 * gamma.sigma_a_sq;
  const double prior = gamma.alpha * (theta.g_star - gamma.g0) * (theta.g_star - gamma.g0);
  const double shrink = gamma.beta * gamma.g0 * gamma.g0 *
                        (theta.k_v * theta.k_v + theta.k_g * theta.k_g);

  double x = s.observed.back().lag.x;
  double v = s.observed.back().lag.v;
  VehicleState lead = s.observed.back().lead;
  for (std::size_t j = 0; j < s.lead_future.size(); ++j) {
    const double g = lead.x - x - s.lead_length;
    const double a = theta.k_v * (lead.v - v) + theta.k_g * (g - theta.g_star);
    x += v * s.dt + 0.5 * a * s.dt * s.dt;
    v += a * s.dt;
    if (v < 0.0) return std::numeric_limits<double>::infinity();
    lead = s.lead_future[j];
  }
  return fit + prior + shrink;
}

Scenario noisy_synth(std::uint64_t seed, double noise = 0.25) {
  SynthConfig config;
  config.n = 1;
  config.noise_sd = noise;
  config.seed = seed;
  config.observe_seconds = 1.0;
  config.horizon_seconds = 1.5;
  return synth_scenarios(config).entries.front().scenario;
}

}  // namespace

TEST(DefaultHyperparams, MeanOfObservedGaps) {
  Scenario s;
  s.dt = 0.1;
  s.lead_length = 5.0;
  // gaps 10, 12, 14
  s.observed = {JointState{{0.0, 10.0}, {15.0, 10.0}},
                JointState{{1.0, 10.0}, {18.0, 10.0}},
                JointState{{2.0, 10.0}, {21.0, 10.0}}};
  s.lead_future = {VehicleState{22.0, 10.0}};
  const Hyperparams gamma = default_hyperparams(s);
  EXPECT_DOUBLE_EQ(gamma.g0, 12.0);
  EXPECT_DOUBLE_EQ(gamma.alpha, 1.0);
  EXPECT_DOUBLE_EQ(gamma.beta, 1.0);
  EXPECT_DOUBLE_EQ(gamma.sigma_a_sq, 1.0);
}

TEST(DefaultHyperparams, SingleAndDegenerateGaps) {
  Scenario s;
  s.dt = 0.1;
  s.lead_length = 3.0;
  s.observed = {JointState{{0.0, 10.0}, {10.0, 10.0}}};  // gap 7
  s.lead_future = {VehicleState{11.0, 10.0}};
  EXPECT_DOUBLE_EQ(default_hyperparams(s).g0, 7.0);

  // Coincident bumpers: the mean gap and with it the shrinkage term vanish.
  Scenario zero = s;
  zero.observed = {JointState{{0.0, 10.0}, {3.0, 10.0}},
                   JointState{{1.0, 10.0}, {4.0, 10.0}}};
  EXPECT_DOUBLE_EQ(default_hyperparams(zero).g0, 0.0);
  const auto [gp, gs] = prior_terms(ControllerParams{2.0, 3.0, 0.0}, default_hyperparams(zero));
  EXPECT_DOUBLE_EQ(gs, 0.0);
  EXPECT_DOUBLE_EQ(gp, 0.0);

  Scenario empty;
  EXPECT_THROW(default_hyperparams(empty), EmptyObservation);
}

TEST(DataFit, ExactFitIsZero) {
  // Data generated noiselessly by theta evaluates to zero at theta.
  SynthConfig config;
  config.n = 1;
  config.noise_sd = 0.0;
  config.seed = 11;
  const Scenario s = synth_scenarios(config).entries.front().scenario;
  EXPECT_NEAR(data_fit_term(s, config.theta_star), 0.0, 1e-18);
}

TEST(DataFit, ZeroControlOnConstantVelocity) {
  const Scenario s = testutil::equilibrium_scenario(6, 4);
  EXPECT_DOUBLE_EQ(data_fit_term(s, ControllerParams{0.0, 0.0, 3.0}), 0.0);
}

TEST(DataFit, MatchesIndependentSum) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario s = noisy_synth(100 + trial);
    const ControllerParams theta{rng.uniform(0.0, 2.0), rng.uniform(0.0, 1.0),
                                 rng.uniform(0.0, 20.0)};
    Hyperparams gamma;
    gamma.alpha = 0.0;
    gamma.beta = 0.0;
    gamma.g0 = 0.0;
    const double expected = recompute_total(s, theta, gamma);
    if (!std::isfinite(expected)) continue;
    EXPECT_NEAR(data_fit_term(s, theta), expected, 1e-12 * std::max(1.0, expected));
  }
}

TEST(DataFit, TooShortThrows) {
  Scenario s = testutil::equilibrium_scenario(4, 4);
  s.observed.resize(1);
  EXPECT_THROW(data_fit_term(s, ControllerParams{}), SequenceTooShort);
}

TEST(PriorTerms, DirectFormulas) {
  Hyperparams gamma;
  gamma.alpha = 1.0;
  gamma.beta = 1.0;
  gamma.g0 = 12.0;
  const auto [gap_prior, shrink] = prior_terms(ControllerParams{0.5, 0.1, 8.0}, gamma);
  EXPECT_NEAR(gap_prior, 16.0, 1e-12);
  EXPECT_NEAR(shrink, 144.0 * 0.26, 1e-12);

  const auto at_mode = prior_terms(ControllerParams{0.5, 0.1, 12.0}, gamma);
  EXPECT_DOUBLE_EQ(at_mode.first, 0.0);
  const auto zero_gain = prior_terms(ControllerParams{0.0, 0.0, 8.0}, gamma);
  EXPECT_DOUBLE_EQ(zero_gain.second, 0.0);
}

TEST(Feasibility, ZeroGainsStayPositive) {
  const Scenario s = testutil::equilibrium_scenario(4, 20, 10.0);
  EXPECT_TRUE(future_velocity_feasible(s, ControllerParams{0.0, 0.0, 4.0}));
}

TEST(Feasibility, HardBrakingGoesNegative) {
  // Huge gap gain with the lead crawling just ahead brakes through zero;
  // confirmed by direct simulation below.
  Scenario s = testutil::equilibrium_scenario(4, 30, 12.0, 2.0, 4.0);
  for (VehicleState& lead : s.lead_future) lead.v = 0.5;
  const ControllerParams theta{0.0, 60.0, 25.0};
  const auto traj = rollout(s, theta);
  bool went_negative = false;
  for (const VehicleState& st : traj) went_negative = went_negative || st.v < 0.0;
  ASSERT_TRUE(went_negative);
  EXPECT_FALSE(future_velocity_feasible(s, theta));
}

TEST(Feasibility, SingleStepBoundary) {
  const Scenario s = testutil::equilibrium_scenario(3, 1, 10.0);
  EXPECT_TRUE(future_velocity_feasible(s, ControllerParams{0.2, 0.1, 12.0}));
}

TEST(NegLogLikelihood, NoiselessAtGeneratorIsZero) {
  SynthConfig config;
  config.n = 1;
  config.noise_sd = 0.0;
  config.seed = 3;
  const Scenario s = synth_scenarios(config).entries.front().scenario;
  Hyperparams gamma;
  gamma.alpha = 0.0;
  gamma.beta = 0.0;
  gamma.g0 = config.theta_star.g_star;
  const LikelihoodBreakdown f = neg_log_likelihood(s, config.theta_star, gamma);
  EXPECT_TRUE(f.future_velocity_feasible);
  EXPECT_NEAR(f.total, 0.0, 1e-16);
}

TEST(NegLogLikelihood, InfeasibleIsInfinite) {
  Scenario s = testutil::equilibrium_scenario(4, 30, 12.0, 2.0, 4.0);
  for (VehicleState& lead : s.lead_future) lead.v = 0.0;
  const LikelihoodBreakdown f =
      neg_log_likelihood(s, ControllerParams{0.0, 80.0, 30.0}, default_hyperparams(s));
  EXPECT_FALSE(f.future_velocity_feasible);
  EXPECT_TRUE(std::isinf(f.total));
  EXPECT_GT(f.total, 0.0);
}

TEST(NegLogLikelihood, MatchesIndependentRecomputation) {
  Rng rng(21);
  int compared = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Scenario s = noisy_synth(300 + trial);
    Hyperparams gamma = default_hyperparams(s);
    gamma.alpha = rng.uniform(0.0, 2.0);
    gamma.beta = rng.uniform(0.0, 2.0);
    const ControllerParams theta{rng.uniform(0.0, 1.5), rng.uniform(0.0, 0.8),
                                 rng.uniform(0.0, 25.0)};
    const double expected = recompute_total(s, theta, gamma);
    const LikelihoodBreakdown f = neg_log_likelihood(s, theta, gamma);
    if (std::isinf(expected)) {
      EXPECT_TRUE(std::isinf(f.total));
      continue;
    }
    ++compared;
    EXPECT_NEAR(f.total, expected, 1e-12 * std::max(1.0, expected));
    EXPECT_NEAR(f.total, f.data_fit + f.gap_prior + f.gain_shrinkage,
                1e-12 * std::max(1.0, expected));
    EXPECT_GE(f.data_fit, 0.0);
    EXPECT_GE(f.gap_prior, 0.0);
    EXPECT_GE(f.gain_shrinkage, 0.0);
  }
  EXPECT_GT(compared, 10);
}

TEST(NegLogLikelihood, MonotoneInAlpha) {
  const Scenario s = noisy_synth(55);
  Hyperparams gamma = default_hyperparams(s);
  const ControllerParams theta{0.3, 0.1, gamma.g0 + 3.0};
  double prev = -1.0;
  for (double alpha : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    gamma.alpha = alpha;
    const double total = neg_log_likelihood(s, theta, gamma).total;
    EXPECT_GE(total, prev);
    prev = total;
  }
}

TEST(NegLogLikelihood, UnregularizedEqualsHalfSumOfSquares) {
  const Scenario s = noisy_synth(77);
  Hyperparams gamma;
  gamma.alpha = 0.0;
  gamma.beta = 0.0;
  gamma.g0 = 5.0;
  const ControllerParams theta{0.2, 0.05, 9.0};
  const LikelihoodBreakdown f = neg_log_likelihood(s, theta, gamma);
  if (!f.future_velocity_feasible) GTEST_SKIP();
  const auto accels = finite_diff_accels(observed_lag_velocities(s), s.dt);
  double half_ss = 0.0;
  for (std::size_t i = 0; i < accels.size(); ++i) {
    const double r = accels[i] - controller_accel(s.observed[i], theta, s.lead_length);
    half_ss += 0.5 * r * r;
  }
  EXPECT_NEAR(f.total, half_ss, 1e-12 * std::max(1.0, half_ss));
}
