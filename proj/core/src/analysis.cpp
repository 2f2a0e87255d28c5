#include "sacd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sacd {
namespace {

// Action-part gradient of upstream . Q at (s, a) for the given parameters.
std::vector<double> action_gradient(const DecomposedCritic& critic,
                                    const std::vector<double>& params, const ForwardCache& cache,
                                    std::span<const double> upstream, int action_dim) {
  std::vector<double> scratch(params.size(), 0.0);
  std::vector<double> grad_input;
  mlp_backward(critic.spec, params, cache, upstream, scratch, &grad_input);
  return std::vector<double>(grad_input.end() - action_dim, grad_input.end());
}

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

InfluenceSample influence(std::span<const double> state, const DecomposedCritic& critic,
                          const SquashedGaussianPolicy& policy, std::span<const double> w,
                          double lambda) {
  const int n = critic.num_heads;
  const int d = policy.action_dim;
  if (static_cast<int>(w.size()) != n) throw std::invalid_argument("influence: weight length mismatch");

  const std::vector<double> abar = deterministic_action(policy, state);
  ForwardCache c1, c2;
  const std::vector<double> q1 = critic.forward(critic.online1, state, abar, &c1);
  const std::vector<double> q2 = critic.forward(critic.online2, state, abar, &c2);
  const bool first = composite_value(q1, w) <= composite_value(q2, w);
  const auto& params = first ? critic.online1 : critic.online2;
  const auto& cache = first ? c1 : c2;

  const std::vector<double> g_full =
      action_gradient(critic, params, cache, w, d);

  InfluenceSample out;
  out.lambda = lambda;
  out.influence.resize(n);
  for (int i = 0; i < n; ++i) {
    // Route 1: definitional, grad of composite minus grad of the ablated composite.
    std::vector<double> w_ablate(w.begin(), w.end());
    w_ablate[i] = 0.0;
    const std::vector<double> g_ablate = action_gradient(critic, params, cache, w_ablate, d);
    std::vector<double> diff(d);
    for (int k = 0; k < d; ++k) diff[k] = g_full[k] - g_ablate[k];
    const double definitional = lambda * l2(diff);

    // Route 2: linear identity lambda * |w_i| * ||grad_a Q_i||.
    std::vector<double> basis(n, 0.0);
    basis[i] = 1.0;
    const std::vector<double> g_head = action_gradient(critic, params, cache, basis, d);
    const double linear = lambda * std::abs(w[i]) * l2(g_head);

    if (std::abs(definitional - linear) > 1e-8)
      throw std::logic_error("influence: definitional and linear routes disagree");
    out.influence[i] = definitional;
  }
  out.fractional = fractional_influence(out.influence, &out.degenerate);
  return out;
}

std::vector<double> fractional_influence(std::span<const double> I, bool* degenerate) {
  double total = 0.0;
  for (double x : I) {
    if (x < 0.0) throw std::invalid_argument("fractional_influence: negative influence");
    total += x;
  }
  std::vector<double> out(I.size(), 0.0);
  const bool degen = total == 0.0;
  if (!degen)
    for (std::size_t i = 0; i < I.size(); ++i) out[i] = I[i] / total;
  if (degenerate) *degenerate = degen;
  return out;
}

std::vector<InfluenceSample> trajectory_influence(const Episode& episode,
                                                  const DecomposedCritic& critic,
                                                  const SquashedGaussianPolicy& policy,
                                                  std::span<const double> w, double lambda) {
  std::vector<InfluenceSample> rows;
  rows.reserve(episode.states.size());
  for (const auto& s : episode.states) rows.push_back(influence(s, critic, policy, w, lambda));
  return rows;
}

ComponentReturnTrace mc_component_returns(const Episode& episode, double gamma) {
  const std::size_t T = episode.length();
  if (T == 0) throw std::invalid_argument("mc_component_returns: empty episode");
  const std::size_t m = episode.rewards[0].size();
  ComponentReturnTrace trace;
  trace.gamma = gamma;
  trace.returns.assign(T, std::vector<double>(m, 0.0));
  trace.returns[T - 1] = episode.rewards[T - 1];
  for (std::size_t t = T - 1; t-- > 0;)
    for (std::size_t i = 0; i < m; ++i)
      trace.returns[t][i] = episode.rewards[t][i] + gamma * trace.returns[t + 1][i];
  return trace;
}

double iqm(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("iqm: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t drop = values.size() / 4;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = drop; i < values.size() - drop; ++i) {
    sum += values[i];
    count += 1;
  }
  return sum / static_cast<double>(count);
}

AccuracyReport prediction_accuracy(const std::vector<Episode>& trajectories,
                                   const Predictor& predict, double gamma, int window) {
  if (trajectories.empty()) throw std::invalid_argument("prediction_accuracy: no trajectories");
  const std::size_t m = trajectories[0].rewards.empty() ? 0 : trajectories[0].rewards[0].size();
  std::vector<std::vector<double>> rmses(m), corrs(m);
  std::vector<bool> flagged(m, false);
  int used = 0, skipped = 0;

  for (const Episode& ep : trajectories) {
    const std::size_t T = ep.length();
    if (T < static_cast<std::size_t>(window)) {
      skipped += 1;
      continue;
    }
    used += 1;
    const ComponentReturnTrace trace = mc_component_returns(ep, gamma);
    const std::size_t start = T - static_cast<std::size_t>(window);
    std::vector<std::vector<double>> preds(window), rets(window);
    for (int k = 0; k < window; ++k) {
      const std::size_t t = start + k;
      preds[k] = predict(ep.states[t], ep.actions[t]);
      rets[k] = trace.returns[t];
    }
    for (std::size_t i = 0; i < m; ++i) {
      double se = 0.0, mp = 0.0, mr = 0.0;
      for (int k = 0; k < window; ++k) {
        const double e = preds[k][i] - rets[k][i];
        se += e * e;
        mp += preds[k][i];
        mr += rets[k][i];
      }
      rmses[i].push_back(std::sqrt(se / window));
      mp /= window;
      mr /= window;
      double spp = 0.0, srr = 0.0, spr = 0.0;
      for (int k = 0; k < window; ++k) {
        spp += (preds[k][i] - mp) * (preds[k][i] - mp);
        srr += (rets[k][i] - mr) * (rets[k][i] - mr);
        spr += (preds[k][i] - mp) * (rets[k][i] - mr);
      }
      if (spp == 0.0 || srr == 0.0) {
        corrs[i].push_back(0.0);  // undefined correlation reported as 0
        flagged[i] = true;
      } else {
        corrs[i].push_back(spr / std::sqrt(spp * srr));
      }
    }
  }

  AccuracyReport report;
  report.trajectories_used = used;
  report.trajectories_skipped = skipped;
  report.correlation_flagged = flagged;
  if (used == 0) throw std::runtime_error("prediction_accuracy: all trajectories shorter than window");
  for (std::size_t i = 0; i < m; ++i) {
    report.iqm_rmse.push_back(iqm(rmses[i]));
    report.iqm_correlation.push_back(iqm(corrs[i]));
  }
  return report;
}

InfluenceSummary influence_training_summary(
    const std::vector<std::pair<std::int64_t, std::vector<double>>>& snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("influence_training_summary: empty log");
  const std::size_t n = snapshots.back().second.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::vector<double>& last = snapshots.back().second;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return last[a] > last[b]; });
  InfluenceSummary summary;
  summary.order = order;
  for (const auto& [step, means] : snapshots) {
    if (means.size() != n)
      throw std::invalid_argument("influence_training_summary: inconsistent snapshot width");
    summary.steps.push_back(step);
    std::vector<double> row(n);
    for (std::size_t k = 0; k < n; ++k) row[k] = means[order[k]];
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

}  // namespace sacd
