#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sacd {

enum class Sign { Free, NonPositive, NonNegative };

/// w(t) = tanh(beta * |t - tau|+), with |x|+ = 0.01 for x < 0 and x otherwise.
/// Softens a penalty component early in training and lets it return to 1.
struct WeightSchedule {
  double tau_warmup = 100.0;
  double beta = 4e-4;
  bool floor_weight = false;  // substitute max(0.01, w) for the warm-up floor
};

double schedule_weight(double t, const WeightSchedule& sched);
double schedule_weight(double t, double tau_warmup, double beta, bool floor_weight = false);

struct ComponentSpec {
  std::string name;
  double weight = 1.0;
  Sign sign = Sign::Free;
  bool clip_target = false;
  bool penalty = false;
  std::optional<WeightSchedule> schedule;

  bool valid() const {
    if ((clip_target || penalty) && sign == Sign::Free) return false;
    if (schedule && !(schedule->tau_warmup > 0.0 && schedule->beta > 0.0)) return false;
    return true;
  }

  double weight_at(double t) const {
    return schedule ? weight * schedule_weight(t, *schedule) : weight;
  }
};

/// Clamps a bootstrap target onto the component's feasible half-line.
double clip_target(Sign sign, double y);

/// Penalty loss pushing a prediction back toward its feasible half-line;
/// zero when feasible, 0.5*|q| otherwise.
double sign_penalty(Sign sign, double q);
double sign_penalty_grad(Sign sign, double q);

}  // namespace sacd
