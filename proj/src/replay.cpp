#include "maxentdp/sac.hpp"

#include <stdexcept>

namespace maxentdp {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  if (state_dim < 0 || action_dim < 1) throw std::invalid_argument("replay buffer dimensions invalid");
}

ReplayBuffer ReplayBuffer::restore(std::size_t capacity, int state_dim, int action_dim, std::size_t size,
                                   std::size_t cursor, std::vector<double> data) {
  ReplayBuffer b(capacity, state_dim, action_dim);
  if (size > capacity || cursor >= capacity || data.size() != size * b.stride())
    throw std::invalid_argument("replay buffer restore: inconsistent state");
  b.size_ = size;
  b.cursor_ = cursor;
  b.data_ = std::move(data);
  return b;
}

void ReplayBuffer::push(const Transition& tr) {
  if (tr.s.size() != state_dim_ || tr.s_next.size() != state_dim_ || tr.a.size() != action_dim_)
    throw std::invalid_argument("replay buffer push: transition dimension mismatch");
  if (!std::isfinite(tr.r)) throw std::invalid_argument("replay buffer push: non-finite reward");
  const std::size_t w = stride();
  if (size_ < capacity_) data_.resize((size_ + 1) * w);
  double* row = data_.data() + cursor_ * w;
  for (int i = 0; i < state_dim_; ++i) *row++ = tr.s[i];
  for (int i = 0; i < action_dim_; ++i) *row++ = tr.a[i];
  *row++ = tr.r;
  for (int i = 0; i < state_dim_; ++i) *row++ = tr.s_next[i];
  *row = tr.done ? 1.0 : 0.0;
  cursor_ = (cursor_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

Transition ReplayBuffer::at(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("replay buffer index out of range");
  const double* row = data_.data() + index * stride();
  Transition tr;
  tr.s = Eigen::Map<const Vec>(row, state_dim_);
  row += state_dim_;
  tr.a = Eigen::Map<const Vec>(row, action_dim_);
  row += action_dim_;
  tr.r = *row++;
  tr.s_next = Eigen::Map<const Vec>(row, state_dim_);
  tr.done = row[state_dim_] != 0.0;
  return tr;
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch b{Mat(state_dim_, n), Mat(action_dim_, n), Vec(n), Mat(state_dim_, n), Vec(n), indices};
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition tr = at(indices[static_cast<std::size_t>(j)]);
    b.s.col(j) = tr.s;
    b.a.col(j) = tr.a;
    b.r[j] = tr.r;
    b.s_next.col(j) = tr.s_next;
    b.done[j] = tr.done ? 1.0 : 0.0;
  }
  return b;
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("cannot sample from an empty replay buffer");
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(size_));
  return gather(idx);
}

}  // namespace maxentdp
