#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace oppnet {

using NodeId = std::uint32_t;
using MessageId = std::uint32_t;
using WaypointId = std::uint32_t;

/// Simulation time in seconds.
using SimTime = double;

inline constexpr SimTime kSecondsPerDay = 86400.0;
inline constexpr SimTime kSecondsPerHour = 3600.0;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double squared_distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Unordered node pair, stored with first < second.
struct NodePair {
  NodeId first = 0;
  NodeId second = 0;

  NodePair() = default;
  NodePair(NodeId a, NodeId b) : first(a < b ? a : b), second(a < b ? b : a) {}

  friend bool operator==(const NodePair&, const NodePair&) = default;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

}  // namespace oppnet
