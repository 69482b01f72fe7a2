#include "oppnet/buffer.hpp"

#include <algorithm>

namespace oppnet {

AdmitResult Buffer::admit(const Message& message, double now) {
  AdmitResult result;
  result.expired = expire(now);
  if (message.expired(now) || message.size > capacity_ || contains(message.id)) return result;
  while (occupancy_ + message.size > capacity_) {
    result.evicted.push_back(entries_.front().message);
    erase_at(0);
  }
  entries_.push_back({message, now});
  occupancy_ += message.size;
  if (held_.size() <= message.id) held_.resize(message.id + 1, false);
  held_[message.id] = true;
  next_expiry_ = std::min(next_expiry_, message.expires_at());
  result.admitted = true;
  return result;
}

std::vector<Message> Buffer::expire(double now) {
  std::vector<Message> removed;
  if (now < next_expiry_) return removed;
  std::size_t keep = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].message.expired(now)) {
      removed.push_back(entries_[i].message);
      occupancy_ -= entries_[i].message.size;
      held_[entries_[i].message.id] = false;
    } else {
      entries_[keep++] = entries_[i];
    }
  }
  entries_.resize(keep);
  refresh_next_expiry();
  return removed;
}

bool Buffer::remove(MessageId id) {
  if (!contains(id)) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].message.id == id) {
      erase_at(i);
      return true;
    }
  }
  return false;
}

const Message* Buffer::find(MessageId id) const {
  if (!contains(id)) return nullptr;
  for (const auto& e : entries_) {
    if (e.message.id == id) return &e.message;
  }
  return nullptr;
}

void Buffer::erase_at(std::size_t index) {
  const Message& m = entries_[index].message;
  occupancy_ -= m.size;
  held_[m.id] = false;
  const bool was_next = m.expires_at() <= next_expiry_;
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(index));
  if (was_next) refresh_next_expiry();
}

void Buffer::refresh_next_expiry() {
  next_expiry_ = std::numeric_limits<double>::infinity();
  for (const auto& e : entries_) next_expiry_ = std::min(next_expiry_, e.message.expires_at());
}

}  // namespace oppnet
