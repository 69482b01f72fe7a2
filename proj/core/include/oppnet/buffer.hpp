#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "oppnet/message.hpp"

namespace oppnet {

struct StoredMessage {
  Message message;
  double received_at = 0.0;
};

struct AdmitResult {
  bool admitted = false;
  std::vector<Message> evicted;
  std::vector<Message> expired;
};

/// Capacity-bounded message store kept in receipt order. Eviction is FIFO by
/// receipt time.
class Buffer {
 public:
  explicit Buffer(std::int64_t capacity) : capacity_(capacity) {}

  /// Purges expired messages, then stores `message`, evicting the oldest
  /// received messages until it fits. Rejects messages larger than the
  /// capacity and ids already held.
  AdmitResult admit(const Message& message, double now);
  /// Removes messages with created_at + ttl <= now.
  std::vector<Message> expire(double now);
  bool remove(MessageId id);

  bool contains(MessageId id) const { return id < held_.size() && held_[id]; }
  const Message* find(MessageId id) const;

  std::int64_t capacity() const { return capacity_; }
  std::int64_t occupancy() const { return occupancy_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const StoredMessage> entries() const { return entries_; }
  double next_expiry() const { return next_expiry_; }

 private:
  void erase_at(std::size_t index);
  void refresh_next_expiry();

  std::int64_t capacity_;
  std::int64_t occupancy_ = 0;
  std::vector<StoredMessage> entries_;
  std::vector<bool> held_;
  double next_expiry_ = std::numeric_limits<double>::infinity();
};

}  // namespace oppnet
