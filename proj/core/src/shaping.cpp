#include "sacd/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sacd {

double schedule_weight(double t, double tau_warmup, double beta, bool floor_weight) {
  const double x = t - tau_warmup;
  const double hinged = x < 0.0 ? 0.01 : x;
  const double w = std::tanh(beta * hinged);
  return floor_weight ? std::max(0.01, w) : w;
}

double schedule_weight(double t, const WeightSchedule& sched) {
  return schedule_weight(t, sched.tau_warmup, sched.beta, sched.floor_weight);
}

double clip_target(Sign sign, double y) {
  switch (sign) {
    case Sign::NonPositive:
      return std::min(0.0, y);
    case Sign::NonNegative:
      return std::max(0.0, y);
    case Sign::Free:
      break;
  }
  throw std::invalid_argument("clip_target: sign must not be Free");
}

double sign_penalty(Sign sign, double q) {
  switch (sign) {
    case Sign::NonPositive:
      return q > 0.0 ? 0.5 * q : 0.0;
    case Sign::NonNegative:
      return q < 0.0 ? -0.5 * q : 0.0;
    case Sign::Free:
      break;
  }
  throw std::invalid_argument("sign_penalty: sign must not be Free");
}

double sign_penalty_grad(Sign sign, double q) {
  switch (sign) {
    case Sign::NonPositive:
      return q > 0.0 ? 0.5 : 0.0;
    case Sign::NonNegative:
      return q < 0.0 ? -0.5 : 0.0;
    case Sign::Free:
      break;
  }
  throw std::invalid_argument("sign_penalty_grad: sign must not be Free");
}

}  // namespace sacd
