#pragma once

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <vector>

namespace slicemkt {

// One environment step for all agents; the trainer knows the per-agent
// offsets inside each vector.
struct Transition {
  Eigen::VectorXd states;
  Eigen::VectorXd actions;
  Eigen::VectorXd rewards;
  Eigen::VectorXd next_states;
};

// FIFO ring with uniform sampling without replacement within a batch.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
  }

  void push(Transition t) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool can_sample(std::size_t batch) const { return data_.size() >= batch; }
  const Transition& at(std::size_t i) const { return data_[i]; }

  // Uniform batch of distinct indices (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t batch, std::mt19937_64& rng) {
    if (!can_sample(batch))
      throw std::logic_error("ReplayBuffer: warmup, not enough transitions");
    if (scratch_.size() != data_.size()) {
      scratch_.resize(data_.size());
      for (std::size_t i = 0; i < scratch_.size(); ++i) scratch_[i] = i;
    }
    std::vector<std::size_t> out(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      std::uniform_int_distribution<std::size_t> dist(i, scratch_.size() - 1);
      std::swap(scratch_[i], scratch_[dist(rng)]);
      out[i] = scratch_[i];
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
  std::vector<std::size_t> scratch_;
};

}  // namespace slicemkt
