#pragma once
// Fixed-capacity FIFO experience replay with uniform sampling (with
// replacement). States are stored as float32 to keep the larger buffer
// (5e5 low-level transitions) comfortably in memory.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "agghrl/rng.hpp"

namespace agghrl {

using FVec = std::vector<float>;

inline FVec to_f32(const std::vector<double>& v) { return FVec(v.begin(), v.end()); }
inline std::vector<double> to_f64(const FVec& v) { return std::vector<double>(v.begin(), v.end()); }

// High-level transition: one executed option. duration is the number of
// primitive steps it ran for; next_option_mask is the set of options legal
// in the successor state (unused when terminal).
struct HighTransition {
  FVec state;
  int option = 0;
  double reward = 0.0;
  FVec next_state;
  int duration = 1;
  bool terminal = false;
  std::vector<char> next_option_mask;
};

// Low-level transition: one filled slot.
struct LowTransition {
  FVec state;
  int action = 0;
  double reward = 0.0;
  FVec next_state;
  bool terminal = false;
  std::vector<char> next_action_mask;
};

template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  }

  void push(T t) {
    if (buf_.size() < capacity_) {
      buf_.push_back(std::move(t));
    } else {
      buf_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
  }

  std::size_t size() const { return buf_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool ready(std::size_t batch) const { return buf_.size() >= batch; }
  const T& at(std::size_t i) const { return buf_[i]; }

  std::vector<const T*> sample(std::size_t batch, Rng& rng) const {
    if (buf_.empty()) throw std::logic_error("ReplayBuffer: sample from empty buffer");
    std::vector<const T*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i)
      out.push_back(&buf_[rng.uniform_int(buf_.size())]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<T> buf_;
};

}  // namespace agghrl
