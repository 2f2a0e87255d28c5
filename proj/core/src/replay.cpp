#include "sacd/replay.hpp"

#include <stdexcept>

namespace sacd {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int num_components)
    : capacity_(capacity), m_(num_components) {
  if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  if (m_ < 1) throw std::invalid_argument("ReplayBuffer: need at least one component");
  storage_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (static_cast<int>(t.r.size()) != m_)
    throw std::invalid_argument("ReplayBuffer::push: reward vector has wrong length");
  std::lock_guard<std::mutex> lock(mu_);
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[insertions_ % capacity_] = std::move(t);
  }
  insertions_ += 1;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch_size, std::mt19937_64& rng) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (storage_.empty()) throw std::runtime_error("ReplayBuffer::sample: buffer is empty");
  std::uniform_int_distribution<std::size_t> dist(0, storage_.size() - 1);
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(storage_[dist(rng)]);
  return batch;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return storage_.size();
}

}  // namespace sacd
