#pragma once

#include <cstdint>

#include "oppnet/types.hpp"

namespace oppnet {

struct Message {
  MessageId id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  std::int64_t size = 0;  // bytes
  double created_at = 0.0;
  double ttl = 0.0;

  double expires_at() const { return created_at + ttl; }
  /// Expiry is closed: a message is gone at exactly created_at + ttl.
  bool expired(double now) const { return expires_at() <= now; }

  friend bool operator==(const Message&, const Message&) = default;
};

}  // namespace oppnet
