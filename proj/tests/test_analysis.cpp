#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "sacd/analysis.hpp"
#include "test_util.hpp"

using namespace sacd;

namespace {

// Linear critic Q_i(s, a) = c_i * a on a 2-D state, both twins identical,
// so the action gradient of each head is exactly c_i.
DecomposedCritic linear_critic(const std::vector<double>& c) {
  DecomposedCritic critic;
  const int n = static_cast<int>(c.size());
  critic.spec = MlpSpec{3, {}, n};
  critic.num_heads = n;
  critic.online1.assign(param_count(critic.spec), 0.0);
  for (int i = 0; i < n; ++i) critic.online1[i * 3 + 2] = c[i];  // weight on the action input
  critic.online2 = critic.online1;
  critic.target1 = critic.online1;
  critic.target2 = critic.online2;
  return critic;
}

Episode constant_reward_episode(int T, const std::vector<double>& r) {
  Episode ep;
  for (int t = 0; t < T; ++t) {
    ep.states.push_back({static_cast<double>(t)});
    ep.actions.push_back({0.0});
    ep.rewards.push_back(r);
  }
  return ep;
}

}  // namespace

TEST_CASE("influence: both routes agree on random critics over 200 states") {
  std::mt19937_64 rng(41);
  const auto critic = DecomposedCritic::make(2, 1, 3, {8, 8}, 7);
  const auto policy = SquashedGaussianPolicy::make(2, 1, {8}, 9);
  const std::vector<double> w = {1.0, 0.5, 2.0};
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testutil::random_vec(rng, 2);
    // influence() throws if the definitional and linear routes disagree.
    const auto sample = influence(s, critic, policy, w);
    REQUIRE(sample.influence.size() == 3);
    double frac_sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      CHECK(sample.influence[i] >= 0.0);
      frac_sum += sample.fractional[i];
    }
    if (!sample.degenerate) CHECK(frac_sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("influence on a hand-built linear critic") {
  const auto critic = linear_critic({1.0, 5.0, 0.1, 0.0});
  const auto policy = SquashedGaussianPolicy::make(2, 1, {4}, 3);
  const std::vector<double> w = {1.0, 1.0, 1.0, 1.0};
  const auto sample = influence(std::vector<double>{0.3, -0.8}, critic, policy, w);
  CHECK(sample.influence[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sample.influence[1] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(sample.influence[2] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(sample.influence[3] == 0.0);  // flat head has exactly zero influence
  CHECK(sample.influence[1] > sample.influence[0]);
  CHECK(sample.influence[1] > sample.influence[2]);
  CHECK(sample.fractional[1] == doctest::Approx(5.0 / 6.1));
  CHECK(!sample.degenerate);
}

TEST_CASE("influence: zero weight silences a head exactly") {
  const auto critic = linear_critic({1.0, 5.0});
  const auto policy = SquashedGaussianPolicy::make(2, 1, {4}, 3);
  const auto sample = influence(std::vector<double>{0.1, 0.2}, critic, policy,
                                std::vector<double>{1.0, 0.0});
  CHECK(sample.influence[1] == 0.0);
  CHECK(sample.fractional[0] == 1.0);
}

TEST_CASE("influence scales linearly in lambda, fractional is invariant") {
  const auto critic = linear_critic({2.0, 3.0});
  const auto policy = SquashedGaussianPolicy::make(2, 1, {4}, 3);
  const std::vector<double> s = {0.5, 0.5};
  const std::vector<double> w = {1.0, 1.0};
  const auto base = influence(s, critic, policy, w, 1.0);
  for (double lambda : {0.01, 0.5, 1.0}) {
    const auto scaled = influence(s, critic, policy, w, lambda);
    for (int i = 0; i < 2; ++i) {
      CHECK(scaled.influence[i] == doctest::Approx(lambda * base.influence[i]).epsilon(1e-12));
      CHECK(scaled.fractional[i] == doctest::Approx(base.fractional[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("fractional influence: hand values, degenerate flag, validation") {
  bool degen = false;
  const auto f = fractional_influence(std::vector<double>{2.0, 1.0, 1.0}, &degen);
  CHECK(f == std::vector<double>{0.5, 0.25, 0.25});
  CHECK(!degen);
  const auto z = fractional_influence(std::vector<double>{0.0, 0.0}, &degen);
  CHECK(z == std::vector<double>{0.0, 0.0});
  CHECK(degen);
  CHECK_THROWS_AS(fractional_influence(std::vector<double>{-1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("trajectory influence: one sample per visited state") {
  const auto critic = linear_critic({1.0, 2.0});
  const auto policy = SquashedGaussianPolicy::make(2, 1, {4}, 3);
  Episode ep;
  ep.states = {{0.1, 0.0}, {0.2, 0.0}, {0.3, 0.0}};
  ep.actions = {{0.0}, {0.0}, {0.0}};
  ep.rewards = {{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}};
  const auto rows = trajectory_influence(ep, critic, policy, std::vector<double>{1.0, 1.0});
  CHECK(rows.size() == 3);
}

TEST_CASE("MC component returns: hand recursion") {
  Episode ep = constant_reward_episode(3, {1.0, -2.0});
  const auto trace = mc_component_returns(ep, 0.5);
  CHECK(trace.returns[2] == std::vector<double>{1.0, -2.0});
  CHECK(trace.returns[1][0] == doctest::Approx(1.5));
  CHECK(trace.returns[0][0] == doctest::Approx(1.75));
  CHECK(trace.returns[0][1] == doctest::Approx(-3.5));
  CHECK_THROWS_AS(mc_component_returns(Episode{}, 0.99), std::invalid_argument);
}

TEST_CASE("MC returns match the forward discounted sum on a long episode") {
  std::mt19937_64 rng(55);
  Episode ep;
  const int T = 1000;
  const double gamma = 0.99;
  for (int t = 0; t < T; ++t) {
    ep.states.push_back({0.0});
    ep.actions.push_back({0.0});
    ep.rewards.push_back(testutil::random_vec(rng, 2));
  }
  const auto trace = mc_component_returns(ep, gamma);
  for (int t : {0, 137, 500, 998}) {
    for (int i = 0; i < 2; ++i) {
      double forward = 0.0, disc = 1.0;
      for (int k = t; k < T; ++k) {
        forward += disc * ep.rewards[k][i];
        disc *= gamma;
      }
      CHECK(trace.returns[t][i] == doctest::Approx(forward).epsilon(1e-10));
    }
  }
}

TEST_CASE("IQM drops a quarter from each end") {
  CHECK(iqm({1.0, 2.0, 3.0, 100.0}) == doctest::Approx(2.5));
  CHECK(iqm({5.0, 1.0, 4.0, 2.0, 3.0}) == doctest::Approx(3.0));  // drops 1 and 5
  CHECK(iqm({7.0}) == 7.0);
  CHECK_THROWS_AS(iqm({}), std::invalid_argument);
}

TEST_CASE("prediction accuracy: a perfect predictor scores zero RMSE, correlation 1") {
  std::mt19937_64 rng(66);
  std::vector<Episode> eps;
  std::map<double, std::vector<double>> truth;  // state tag -> MC return
  double tag = 0.0;
  for (int e = 0; e < 8; ++e) {
    Episode ep;
    for (int t = 0; t < 30; ++t) {
      ep.states.push_back({tag});
      ep.actions.push_back({0.0});
      ep.rewards.push_back(testutil::random_vec(rng, 2));
      tag += 1.0;
    }
    const auto trace = mc_component_returns(ep, 0.99);
    for (int t = 0; t < 30; ++t) truth[ep.states[t][0]] = trace.returns[t];
    eps.push_back(ep);
  }
  const Predictor perfect = [&](std::span<const double> s, std::span<const double>) {
    return truth.at(s[0]);
  };
  const auto rep = prediction_accuracy(eps, perfect, 0.99, 25);
  CHECK(rep.trajectories_used == 8);
  CHECK(rep.trajectories_skipped == 0);
  for (int i = 0; i < 2; ++i) {
    CHECK(rep.iqm_rmse[i] == doctest::Approx(0.0));
    CHECK(rep.iqm_correlation[i] == doctest::Approx(1.0));
    CHECK(!rep.correlation_flagged[i]);
  }
}

TEST_CASE("prediction accuracy: constant predictor is flagged with correlation 0") {
  std::mt19937_64 rng(67);
  std::vector<Episode> eps;
  for (int e = 0; e < 4; ++e) {
    Episode ep;
    for (int t = 0; t < 30; ++t) {
      ep.states.push_back({0.0});
      ep.actions.push_back({0.0});
      ep.rewards.push_back(testutil::random_vec(rng, 1));
    }
    eps.push_back(ep);
  }
  const Predictor constant = [](std::span<const double>, std::span<const double>) {
    return std::vector<double>{3.0};
  };
  const auto rep = prediction_accuracy(eps, constant, 0.99, 25);
  CHECK(rep.iqm_correlation[0] == 0.0);
  CHECK(rep.correlation_flagged[0]);
  CHECK(rep.iqm_rmse[0] > 0.0);
}

TEST_CASE("prediction accuracy: short trajectories are skipped, all-short throws") {
  std::mt19937_64 rng(68);
  Episode long_ep = constant_reward_episode(30, {1.0});
  Episode short_ep = constant_reward_episode(5, {1.0});
  const Predictor zero = [](std::span<const double>, std::span<const double>) {
    return std::vector<double>{0.0};
  };
  const auto rep = prediction_accuracy({long_ep, short_ep}, zero, 0.99, 25);
  CHECK(rep.trajectories_used == 1);
  CHECK(rep.trajectories_skipped == 1);
  CHECK_THROWS_AS(prediction_accuracy({short_ep}, zero, 0.99, 25), std::runtime_error);
}

TEST_CASE("influence summary orders components by the final snapshot") {
  const std::vector<std::pair<std::int64_t, std::vector<double>>> snapshots = {
      {0, {0.2, 0.5, 0.3}},
      {1000, {0.1, 0.6, 0.3}},
  };
  const auto summary = influence_training_summary(snapshots);
  CHECK(summary.order == std::vector<int>{1, 2, 0});
  CHECK(summary.steps == std::vector<std::int64_t>{0, 1000});
  CHECK(summary.rows[0] == std::vector<double>{0.5, 0.3, 0.2});
  CHECK(summary.rows[1] == std::vector<double>{0.6, 0.3, 0.1});
  CHECK_THROWS_AS(influence_training_summary({}), std::invalid_argument);
  CHECK_THROWS_AS(influence_training_summary({{0, {0.5}}, {1, {0.5, 0.5}}}),
                  std::invalid_argument);
}
