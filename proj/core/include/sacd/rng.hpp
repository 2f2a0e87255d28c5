#pragma once

#include <cstdint>
#include <random>

namespace sacd {

/// All randomness in a run flows from one root seed; each subsystem gets
/// its own stream id so reordering one consumer cannot perturb another.
inline std::mt19937_64 make_stream(std::uint64_t root_seed, std::uint64_t stream_id) {
  std::seed_seq seq{root_seed, stream_id, std::uint64_t{0x9e3779b97f4a7c15ULL}};
  return std::mt19937_64(seq);
}

enum class Stream : std::uint64_t {
  EnvInit = 1,
  PolicyNoise = 2,
  ReplaySample = 3,
  EvalEnv = 4,
  ProbeStates = 5,
  Warmup = 6,
  Exploration = 7,
};

inline std::mt19937_64 make_stream(std::uint64_t root_seed, Stream s) {
  return make_stream(root_seed, static_cast<std::uint64_t>(s));
}

}  // namespace sacd
