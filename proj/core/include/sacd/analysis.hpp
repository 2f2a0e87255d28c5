#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sacd/policy.hpp"
#include "sacd/trainer.hpp"

namespace sacd {

/// Per-state influence: how much each value head bends the policy-gradient
/// direction at the deterministic action.
struct InfluenceSample {
  std::vector<double> influence;   // I_i >= 0, one per head
  std::vector<double> fractional;  // sums to 1 unless degenerate
  bool degenerate = false;         // all-zero influence
  double lambda = 1.0;
};

/// I_i = lambda * || grad_a Q - grad_a Q_without_i || at a = tanh(mu(s)),
/// read from the twin with the minimum composite value. Computed both
/// definitionally and via the linear identity lambda*|w_i|*||grad_a Q_i||;
/// the two routes must agree to 1e-8.
InfluenceSample influence(std::span<const double> state, const DecomposedCritic& critic,
                          const SquashedGaussianPolicy& policy, std::span<const double> w,
                          double lambda = 1.0);

std::vector<double> fractional_influence(std::span<const double> I, bool* degenerate = nullptr);

struct Episode {
  std::vector<std::vector<double>> states;   // state observed before each step
  std::vector<std::vector<double>> actions;
  std::vector<std::vector<double>> rewards;  // per-step component rewards
  bool terminated = false;

  std::size_t length() const { return rewards.size(); }
};

std::vector<InfluenceSample> trajectory_influence(const Episode& episode,
                                                  const DecomposedCritic& critic,
                                                  const SquashedGaussianPolicy& policy,
                                                  std::span<const double> w, double lambda = 1.0);

/// Discounted Monte-Carlo component returns, exact backward recursion,
/// no bootstrapping.
struct ComponentReturnTrace {
  std::vector<std::vector<double>> returns;  // [t][component]
  double gamma = 0.99;
};

ComponentReturnTrace mc_component_returns(const Episode& episode, double gamma);

/// Interquartile mean: mean of the central 50% of values.
double iqm(std::vector<double> values);

struct AccuracyReport {
  std::vector<double> iqm_rmse;
  std::vector<double> iqm_correlation;
  std::vector<bool> correlation_flagged;  // zero-variance window reported as 0
  int trajectories_used = 0;
  int trajectories_skipped = 0;
};

using Predictor =
    std::function<std::vector<double>(std::span<const double> s, std::span<const double> a)>;

/// Per-component IQM RMSE and Pearson correlation between predictions and
/// Monte-Carlo returns over the last K steps of each trajectory.
AccuracyReport prediction_accuracy(const std::vector<Episode>& trajectories,
                                   const Predictor& predict, double gamma, int window);

/// Mean fractional influence per checkpoint, components ordered by their
/// final-checkpoint mean, largest first.
struct InfluenceSummary {
  std::vector<int> order;                    // original component indices, emitted order
  std::vector<std::int64_t> steps;
  std::vector<std::vector<double>> rows;     // [checkpoint][emitted position]
};

InfluenceSummary influence_training_summary(
    const std::vector<std::pair<std::int64_t, std::vector<double>>>& snapshots);

}  // namespace sacd
