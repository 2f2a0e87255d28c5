#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <vector>

namespace sacd {

struct Transition {
  std::vector<double> s;
  std::vector<double> a;
  std::vector<double> r;  // m reward components
  std::vector<double> s_next;
  bool terminated = false;
};

/// Fixed-capacity ring buffer, oldest-first overwrite, uniform sampling with
/// replacement. One writer and one reader may interleave through the lock.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int num_components);

  void push(Transition t);
  std::vector<Transition> sample(std::size_t batch_size, std::mt19937_64& rng) const;

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  int num_components() const { return m_; }

 private:
  std::size_t capacity_;
  int m_;
  mutable std::mutex mu_;
  std::vector<Transition> storage_;
  std::size_t insertions_ = 0;
};

}  // namespace sacd
