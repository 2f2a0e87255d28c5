#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sacd/shaping.hpp"
#include "test_util.hpp"

using namespace sacd;

TEST_CASE("schedule weight: warm-up floor, kink, saturation") {
  const WeightSchedule sched;  // tau = 100, beta = 4e-4
  // Before tau the hinge substitutes the constant 0.01.
  const double floor_val = std::tanh(4e-4 * 0.01);
  CHECK(schedule_weight(0.0, sched) == doctest::Approx(floor_val).epsilon(1e-15));
  CHECK(schedule_weight(99.0, sched) == doctest::Approx(floor_val).epsilon(1e-15));
  CHECK(floor_val == doctest::Approx(4e-6).epsilon(1e-3));
  // At the kink the hinge output is 0.
  CHECK(schedule_weight(100.0, sched) == 0.0);
  // Far past tau the weight saturates to 1.
  CHECK(schedule_weight(1.0e6, sched) == doctest::Approx(1.0).epsilon(1e-12));
  // Hand value at t = 10100: tanh(4e-4 * 10000) = tanh(4).
  CHECK(schedule_weight(10100.0, sched) == doctest::Approx(std::tanh(4.0)).epsilon(1e-15));
}

TEST_CASE("schedule weight is nondecreasing past tau and stays in [0, 1]") {
  const WeightSchedule sched;
  double prev = 0.0;
  for (double t = 100.0; t <= 50000.0; t += 100.0) {
    const double w = schedule_weight(t, sched);
    CHECK(w >= prev);
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);  // tanh rounds to exactly 1.0 for large arguments
    prev = w;
  }
}

TEST_CASE("floor_weight variant clamps the schedule from below at 0.01") {
  const double raw_at_kink = schedule_weight(100.0, 100.0, 4e-4, false);
  CHECK(raw_at_kink == 0.0);
  CHECK(schedule_weight(100.0, 100.0, 4e-4, true) == 0.01);
  CHECK(schedule_weight(0.0, 100.0, 4e-4, true) == 0.01);
  // Once tanh exceeds 0.01 the floor is inactive.
  const double t_big = 100.0 + 1.0 / 4e-4;  // tanh(1) = 0.7616
  CHECK(schedule_weight(t_big, 100.0, 4e-4, true) ==
        doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
}

TEST_CASE("clip_target clamps onto the feasible half-line") {
  CHECK(clip_target(Sign::NonPositive, -3.0) == -3.0);
  CHECK(clip_target(Sign::NonPositive, 2.5) == 0.0);
  CHECK(clip_target(Sign::NonNegative, -3.0) == 0.0);
  CHECK(clip_target(Sign::NonNegative, 2.5) == 2.5);
  CHECK(clip_target(Sign::NonPositive, 0.0) == 0.0);
  CHECK_THROWS_AS(clip_target(Sign::Free, 1.0), std::invalid_argument);
}

TEST_CASE("sign penalty: values on both sides of the boundary") {
  CHECK(sign_penalty(Sign::NonPositive, 2.0) == 1.0);
  CHECK(sign_penalty(Sign::NonPositive, -2.0) == 0.0);
  CHECK(sign_penalty(Sign::NonPositive, 0.0) == 0.0);
  CHECK(sign_penalty(Sign::NonNegative, -4.0) == 2.0);
  CHECK(sign_penalty(Sign::NonNegative, 4.0) == 0.0);
  CHECK_THROWS_AS(sign_penalty(Sign::Free, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sign_penalty_grad(Sign::Free, 1.0), std::invalid_argument);
}

TEST_CASE("sign penalty gradient matches finite differences away from 0") {
  for (const Sign sign : {Sign::NonPositive, Sign::NonNegative}) {
    for (double q : {-3.0, -0.5, 0.5, 3.0}) {
      auto f = [&](const std::vector<double>& x) { return sign_penalty(sign, x[0]); };
      const auto fd = testutil::finite_diff(f, {q});
      CHECK(sign_penalty_grad(sign, q) == doctest::Approx(fd[0]).epsilon(1e-7));
    }
  }
}

TEST_CASE("ComponentSpec validity and scheduled weight") {
  ComponentSpec spec;
  spec.name = "crash";
  spec.weight = 2.0;
  CHECK(spec.valid());
  CHECK(spec.weight_at(12345.0) == 2.0);  // no schedule

  spec.clip_target = true;
  CHECK(!spec.valid());  // clipping needs a sign
  spec.sign = Sign::NonPositive;
  CHECK(spec.valid());

  spec.schedule = WeightSchedule{};
  CHECK(spec.valid());
  CHECK(spec.weight_at(10100.0) == doctest::Approx(2.0 * std::tanh(4.0)));
  spec.schedule->beta = 0.0;
  CHECK(!spec.valid());
}
